"""Binary classifier on (eps, theta) pairs and its log likelihood-to-evidence ratio.

The network is a multilayer perceptron (default 4 hidden layers of 128 SELU
units) with a sigmoid output.  It is trained to separate corresponding
(eps, theta) tuples from shuffled ones with a joint binary cross-entropy:
for two independent batches (eps, theta) and (eps', theta'),

    L = BCE(s(eps, theta), 1) + BCE(s(eps', theta), 0)
      + BCE(s(eps', theta'), 1) + BCE(s(eps, theta'), 0)

each term mean-reduced over the batch.  At the optimum the classifier output
s equals p(eps, theta) / (p(eps, theta) + p(eps) p(theta)), so its logit is
log p(eps|theta) - log p(eps): exactly the log-ratio the MCMC sampler needs.

Everything is plain float64 numpy with hand-written reverse-mode gradients;
losses are computed in logit space (softplus form), which makes the usual
probability clamp unnecessary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import ErrorDataset, ScalingSpec, apply_scaling

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772

DEFAULT_HIDDEN = (128, 128, 128, 128)


class CheckpointError(ValueError):
    """Raised when a checkpoint file cannot be read or fails validation."""


def selu(z):
    """Scaled exponential linear unit with the standard fixed constants."""
    z = np.asarray(z, dtype=float)
    out = np.where(z > 0, SELU_LAMBDA * z, SELU_LAMBDA * SELU_ALPHA * np.expm1(np.minimum(z, 0.0)))
    return out if out.ndim else float(out)


def _selu_grad(z):
    return np.where(z > 0, SELU_LAMBDA, SELU_LAMBDA * SELU_ALPHA * np.exp(np.minimum(z, 0.0)))


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class NetParams:
    """MLP weights/biases plus the scaling metadata needed at inference time.

    weights[l] has shape (fan_out, fan_in); the input layout is
    [eps_scaled, theta_scaled_0, ..., theta_scaled_{d-1}].
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    scaling: ScalingSpec | None = None
    activation: str = "selu"
    train_seed: int | None = None

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def theta_dim(self) -> int:
        return self.input_dim - 1

    def copy(self) -> "NetParams":
        return NetParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            scaling=self.scaling,
            activation=self.activation,
            train_seed=self.train_seed,
        )


def new_net(
    theta_dim: int,
    rng: np.random.Generator,
    hidden: tuple[int, ...] = DEFAULT_HIDDEN,
    scaling: ScalingSpec | None = None,
) -> NetParams:
    """Initialise weights uniform on +-1/sqrt(fan_in), biases zero."""
    sizes = [theta_dim + 1, *hidden, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetParams(weights=weights, biases=biases, scaling=scaling)


def _forward_batch(net: NetParams, X: np.ndarray):
    """Forward pass over a (B, input_dim) batch; returns logits and caches."""
    A = X
    zs, acts = [], [X]
    L = len(net.weights)
    for l, (W, b) in enumerate(zip(net.weights, net.biases)):
        Z = A @ W.T + b
        zs.append(Z)
        if l < L - 1:
            A = selu(Z)
            acts.append(A)
    return zs[-1][:, 0], zs, acts


def _pack_input(eps_scaled, theta_scaled) -> np.ndarray:
    theta_scaled = np.asarray(theta_scaled, dtype=float).ravel()
    x = np.concatenate(([float(eps_scaled)], theta_scaled))
    if not np.all(np.isfinite(x)):
        raise ValueError("classifier input must be finite")
    return x


def forward(net: NetParams, eps_scaled: float, theta_scaled) -> float:
    """Classifier output s(eps, theta) in the open interval (0, 1)."""
    x = _pack_input(eps_scaled, theta_scaled)
    if x.shape[0] != net.input_dim:
        raise ValueError(f"input dim {x.shape[0]} does not match net ({net.input_dim})")
    logit, _, _ = _forward_batch(net, x[None, :])
    p = float(_sigmoid(logit)[0])
    # sigmoid rounds to exactly 0.0/1.0 for |logit| > ~37; keep the contract open
    return min(max(p, 1e-15), 1.0 - 1e-15)


def forward_logit(net: NetParams, eps_scaled: float, theta_scaled) -> float:
    """Final pre-activation; equals log(s) - log(1 - s) exactly."""
    x = _pack_input(eps_scaled, theta_scaled)
    if x.shape[0] != net.input_dim:
        raise ValueError(f"input dim {x.shape[0]} does not match net ({net.input_dim})")
    logit, _, _ = _forward_batch(net, x[None, :])
    return float(logit[0])


def input_gradient(net: NetParams, eps_scaled: float, theta_scaled) -> np.ndarray:
    """Gradient of forward() with respect to its (eps, theta) inputs."""
    x = _pack_input(eps_scaled, theta_scaled)
    logit, zs, acts = _forward_batch(net, x[None, :])
    p = _sigmoid(logit)[0]
    # d p / d z_last, then push back through the layers to the input
    g = np.array([[p * (1.0 - p)]])
    for l in range(len(net.weights) - 1, 0, -1):
        g = (g @ net.weights[l]) * _selu_grad(zs[l - 1])
    g = g @ net.weights[0]
    return g[0]


def _bce_from_logits(z: np.ndarray, y: float) -> np.ndarray:
    """Per-row binary cross entropy, computed stably from logits."""
    return np.logaddexp(0.0, -z) if y == 1 else np.logaddexp(0.0, z)


@dataclass
class NetGrads:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def joint_loss_and_grad(
    net: NetParams,
    eps_a: np.ndarray,
    theta_a: np.ndarray,
    eps_b: np.ndarray,
    theta_b: np.ndarray,
) -> tuple[float, NetGrads]:
    """Joint contrastive BCE over two independent batches and its exact gradient.

    Batch a supplies the corresponding pairs (eps, theta), batch b the
    independent pairs (eps', theta'); the cross terms (eps', theta) and
    (eps, theta') carry label 0.  Both batches must have the same size M >= 2.
    """
    eps_a, theta_a = _check_batch(eps_a, theta_a, net)
    eps_b, theta_b = _check_batch(eps_b, theta_b, net)
    M = eps_a.shape[0]
    if eps_b.shape[0] != M:
        raise ValueError("batches must have equal size")
    if M < 2:
        raise ValueError("joint loss needs batch size M >= 2")

    # Stack the four terms into one pass: (ea,ta;1), (eb,ta;0), (eb,tb;1), (ea,tb;0).
    X = np.empty((4 * M, net.input_dim))
    X[0 * M:1 * M, 0] = eps_a
    X[0 * M:1 * M, 1:] = theta_a
    X[1 * M:2 * M, 0] = eps_b
    X[1 * M:2 * M, 1:] = theta_a
    X[2 * M:3 * M, 0] = eps_b
    X[2 * M:3 * M, 1:] = theta_b
    X[3 * M:4 * M, 0] = eps_a
    X[3 * M:4 * M, 1:] = theta_b
    y = np.concatenate([np.ones(M), np.zeros(M), np.ones(M), np.zeros(M)])

    z, zs, acts = _forward_batch(net, X)
    bce = np.where(y == 1, np.logaddexp(0.0, -z), np.logaddexp(0.0, z))
    # Group the four block means so that swapping the batches permutes the
    # operands of each commutative addition: the value is bit-stable.
    loss = float(
        (bce[0 * M:1 * M].mean() + bce[2 * M:3 * M].mean())
        + (bce[1 * M:2 * M].mean() + bce[3 * M:4 * M].mean())
    )

    p = _sigmoid(z)
    dZ = ((p - y) / M)[:, None]
    gw = [None] * len(net.weights)
    gb = [None] * len(net.weights)
    for l in range(len(net.weights) - 1, -1, -1):
        gw[l] = dZ.T @ acts[l]
        gb[l] = dZ.sum(axis=0)
        if l > 0:
            dZ = (dZ @ net.weights[l]) * _selu_grad(zs[l - 1])
    return loss, NetGrads(weights=gw, biases=gb)


def joint_loss(
    net: NetParams, eps_a, theta_a, eps_b, theta_b
) -> float:
    """Forward-only joint loss (used for validation)."""
    eps_a, theta_a = _check_batch(eps_a, theta_a, net)
    eps_b, theta_b = _check_batch(eps_b, theta_b, net)
    M = eps_a.shape[0]
    if eps_b.shape[0] != M or M < 2:
        raise ValueError("joint loss needs two equal batches of size M >= 2")
    X = np.empty((4 * M, net.input_dim))
    X[0 * M:1 * M, 0] = eps_a
    X[0 * M:1 * M, 1:] = theta_a
    X[1 * M:2 * M, 0] = eps_b
    X[1 * M:2 * M, 1:] = theta_a
    X[2 * M:3 * M, 0] = eps_b
    X[2 * M:3 * M, 1:] = theta_b
    X[3 * M:4 * M, 0] = eps_a
    X[3 * M:4 * M, 1:] = theta_b
    z, _, _ = _forward_batch(net, X)
    y = np.concatenate([np.ones(M), np.zeros(M), np.ones(M), np.zeros(M)])
    bce = np.where(y == 1, np.logaddexp(0.0, -z), np.logaddexp(0.0, z))
    return float(
        (bce[0 * M:1 * M].mean() + bce[2 * M:3 * M].mean())
        + (bce[1 * M:2 * M].mean() + bce[3 * M:4 * M].mean())
    )


def _check_batch(eps, theta, net: NetParams):
    eps = np.asarray(eps, dtype=float).ravel()
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2 or theta.shape[0] != eps.shape[0]:
        raise ValueError("theta batch must be (M, dim) matching eps length")
    if theta.shape[1] != net.theta_dim:
        raise ValueError(f"theta dim {theta.shape[1]} does not match net ({net.theta_dim})")
    return eps, theta


@dataclass
class OptimizerState:
    """Adam accumulators: first/second moments mirroring the parameter shapes."""

    m_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_weights: list[np.ndarray]
    v_biases: list[np.ndarray]
    step: int = 0
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def init_optimizer(net: NetParams, learning_rate: float = 1e-4) -> OptimizerState:
    return OptimizerState(
        m_weights=[np.zeros_like(w) for w in net.weights],
        m_biases=[np.zeros_like(b) for b in net.biases],
        v_weights=[np.zeros_like(w) for w in net.weights],
        v_biases=[np.zeros_like(b) for b in net.biases],
        learning_rate=learning_rate,
    )


def optimizer_step(
    net: NetParams, state: OptimizerState, grads: NetGrads
) -> tuple[NetParams, OptimizerState]:
    """One bias-corrected Adam update; purely functional."""
    for w, g in zip(net.weights, grads.weights):
        if w.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} does not match weights {w.shape}")
    for b, g in zip(net.biases, grads.biases):
        if b.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} does not match biases {b.shape}")

    t = state.step + 1
    b1, b2, lr, eps = state.beta1, state.beta2, state.learning_rate, state.epsilon
    c1 = 1.0 - b1 ** t
    c2 = 1.0 - b2 ** t

    def upd(p, m, v, g):
        m_new = b1 * m + (1.0 - b1) * g
        v_new = b2 * v + (1.0 - b2) * g * g
        p_new = p - lr * (m_new / c1) / (np.sqrt(v_new / c2) + eps)
        return p_new, m_new, v_new

    new_w, new_mw, new_vw = [], [], []
    for p, m, v, g in zip(net.weights, state.m_weights, state.v_weights, grads.weights):
        pn, mn, vn = upd(p, m, v, g)
        new_w.append(pn); new_mw.append(mn); new_vw.append(vn)
    new_b, new_mb, new_vb = [], [], []
    for p, m, v, g in zip(net.biases, state.m_biases, state.v_biases, grads.biases):
        pn, mn, vn = upd(p, m, v, g)
        new_b.append(pn); new_mb.append(mn); new_vb.append(vn)

    net_new = NetParams(
        weights=new_w, biases=new_b, scaling=net.scaling,
        activation=net.activation, train_seed=net.train_seed,
    )
    state_new = replace(
        state, m_weights=new_mw, m_biases=new_mb,
        v_weights=new_vw, v_biases=new_vb, step=t,
    )
    return net_new, state_new


@dataclass
class TrainConfig:
    batch_size: int = 64
    max_epochs: int = 100
    patience: int = 10
    val_fraction: float = 0.1
    seed: int = 0
    learning_rate: float = 1e-4
    hidden: tuple[int, ...] = DEFAULT_HIDDEN

    def __post_init__(self):
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie in (0, 1)")
        if self.max_epochs < 0 or self.patience < 1:
            raise ValueError("max_epochs must be >= 0 and patience >= 1")


@dataclass
class TrainResult:
    params: NetParams
    epochs_run: int
    best_epoch: int
    best_val_loss: float
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)


def train(ds: ErrorDataset, config: TrainConfig) -> TrainResult:
    """Epoch over shuffled pairs of disjoint batches with Adam updates.

    Per step, two disjoint batches are taken from the epoch's shuffled order:
    the first provides the corresponding pairs, the second the independent
    ones.  Early stopping watches the joint loss on a held-out validation
    split; the best-validation parameters are returned.  Fully deterministic
    for a fixed config seed.
    """
    n = len(ds)
    M = config.batch_size
    rng = np.random.default_rng(config.seed)

    perm = rng.permutation(n)
    n_val = max(2, int(round(config.val_fraction * n)))
    val_idx = perm[:n_val]
    train_idx = perm[n_val:]
    if train_idx.shape[0] < 2 * M:
        raise ValueError(
            f"dataset too small: {n} rows leave {train_idx.shape[0]} for training, "
            f"need >= {2 * M}"
        )

    net = new_net(ds.dim, rng, hidden=config.hidden, scaling=ds.scaling)
    net.train_seed = config.seed
    state = init_optimizer(net, learning_rate=config.learning_rate)

    eps_s, theta_s = ds.eps_scaled, ds.theta_scaled
    # Fixed half-vs-half pairing keeps the validation metric comparable
    # across epochs.
    half = val_idx.shape[0] // 2
    va, vb = val_idx[:half], val_idx[half:2 * half]

    def val_loss(p: NetParams) -> float:
        return joint_loss(p, eps_s[va], theta_s[va], eps_s[vb], theta_s[vb])

    best = net.copy()
    best_val = val_loss(net) if config.max_epochs > 0 else float("inf")
    best_epoch = 0
    bad_epochs = 0
    train_losses: list[float] = []
    val_losses: list[float] = []
    epochs_run = 0

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(train_idx)
        losses = []
        for k in range(order.shape[0] // (2 * M)):
            ia = order[2 * k * M:(2 * k + 1) * M]
            ib = order[(2 * k + 1) * M:(2 * k + 2) * M]
            loss, grads = joint_loss_and_grad(
                net, eps_s[ia], theta_s[ia], eps_s[ib], theta_s[ib]
            )
            net, state = optimizer_step(net, state, grads)
            losses.append(loss)
        epochs_run = epoch
        train_losses.append(float(np.mean(losses)))
        vl = val_loss(net)
        val_losses.append(vl)
        if vl < best_val:
            best_val = vl
            best = net.copy()
            best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                break

    return TrainResult(
        params=best,
        epochs_run=epochs_run,
        best_epoch=best_epoch,
        best_val_loss=best_val,
        train_losses=train_losses,
        val_losses=val_losses,
    )


def log_ratio(net: NetParams, eps_raw: float, theta_raw) -> float:
    """log of the estimated ratio p(eps|theta)/p(eps) at raw-unit inputs.

    Inputs are projected through the net's ScalingSpec; eps outside the
    training range is allowed (extrapolation).  Equals logit(s).
    """
    if net.scaling is None:
        raise ValueError("net carries no ScalingSpec; cannot scale raw inputs")
    theta_scaled, eps_scaled = apply_scaling(net.scaling, theta_raw, eps_raw)
    return forward_logit(net, float(eps_scaled), theta_scaled)


CHECKPOINT_VERSION = 1


def save_checkpoint(net: NetParams, path, meta: dict | None = None) -> None:
    """Serialise the net as JSON at full double precision."""
    doc = {
        "format_version": CHECKPOINT_VERSION,
        "activation": net.activation,
        "layer_sizes": net.layer_sizes,
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "scaling": net.scaling.to_dict() if net.scaling is not None else None,
        "train_seed": net.train_seed,
        "meta": meta or {},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_checkpoint(path) -> tuple[NetParams, dict]:
    """Load a checkpoint; raises CheckpointError on any malformed content."""
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    try:
        if doc["format_version"] != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"unsupported checkpoint version {doc['format_version']!r}"
            )
        sizes = [int(s) for s in doc["layer_sizes"]]
        weights = [np.asarray(w, dtype=float) for w in doc["weights"]]
        biases = [np.asarray(b, dtype=float) for b in doc["biases"]]
        scaling = (
            ScalingSpec.from_dict(doc["scaling"]) if doc["scaling"] is not None else None
        )
        net = NetParams(
            weights=weights,
            biases=biases,
            scaling=scaling,
            activation=str(doc["activation"]),
            train_seed=doc.get("train_seed"),
        )
        meta = dict(doc.get("meta") or {})
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(f"malformed checkpoint {path}: {exc}") from exc
    expected = [(sizes[l + 1], sizes[l]) for l in range(len(sizes) - 1)]
    got_w = [w.shape for w in weights]
    got_b = [b.shape for b in biases]
    if got_w != expected or got_b != [(s,) for s in sizes[1:]]:
        raise CheckpointError(f"checkpoint {path}: layer shapes do not match descriptor")
    for arr in (*weights, *biases):
        if not np.all(np.isfinite(arr)):
            raise CheckpointError(f"checkpoint {path}: non-finite parameters")
    return net, meta
