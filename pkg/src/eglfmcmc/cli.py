"""Command-line toolkit: data generation, training, sampling, ABC, diagnostics.

Subcommands
-----------
gen-data   draw parameters from the prior, simulate, write the (theta, eps) CSV
train      fit the classifier on a generated dataset, write a JSON checkpoint
sample     run the error-conditioned Metropolis-Hastings chain
abc        rejection-ABC baseline
check-eps  resimulate parameters drawn from a chain and report their error stats
report     posterior summaries and PGM histograms from chain/dataset CSVs

Every command takes a single --seed controlling all of its randomness and
writes a manifest.json recording the resolved configuration, so any stage can
be reproduced bit-exactly by re-running with --config manifest.json.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .abc import AbcConfig, ZeroAcceptancesError, abc_rejection
from .classifier import (
    CheckpointError,
    TrainConfig,
    load_checkpoint,
    log_ratio,
    save_checkpoint,
    train,
)
from .dataset import (
    ScalingError,
    ScalingSpec,
    build_dataset,
    dataset_from_arrays,
    l1_distance,
    read_dataset_csv,
    write_dataset_csv,
)
from .sampler import (
    ChainConfig,
    ProposalSpec,
    default_proposal,
    read_chain_csv,
    run_chain,
    write_chain_csv,
)
from .simulators import Prior, get_problem

PAPER_STEPS = 1_000_000
PAPER_BURN_IN = 10_000
DESK_STEPS = 100_000
DESK_BURN_IN = 1_000
DESK_DATASET = 50_000


# ---------------------------------------------------------------------------
# summaries and histogram images


@dataclass
class PosteriorSummary:
    """Per-dimension location/spread/quantiles of a set of retained states."""

    count: int
    means: np.ndarray
    stds: np.ndarray
    q05: np.ndarray
    q50: np.ndarray
    q95: np.ndarray
    acceptance_rate: float | None = None


def nearest_rank_quantile(values: np.ndarray, q: float) -> float:
    """Nearest-rank order statistic: the ceil(q*n)-th smallest value."""
    if not 0.0 < q <= 1.0:
        raise ValueError("quantile level must lie in (0, 1]")
    v = np.sort(np.asarray(values, dtype=float))
    idx = max(int(math.ceil(q * v.shape[0])) - 1, 0)
    return float(v[idx])


def summarize_states(states: np.ndarray, acceptance_rate: float | None = None) -> PosteriorSummary:
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    if states.shape[0] == 0:
        raise ValueError("cannot summarise an empty chain")
    qs = lambda q: np.array([nearest_rank_quantile(states[:, j], q) for j in range(states.shape[1])])
    return PosteriorSummary(
        count=states.shape[0],
        means=states.mean(axis=0),
        stds=states.std(axis=0),
        q05=qs(0.05),
        q50=qs(0.50),
        q95=qs(0.95),
        acceptance_rate=acceptance_rate,
    )


def write_summary_csv(path, rows: list[dict]) -> None:
    cols = ["source", "component", "count", "mean", "std", "q5", "q50", "q95", "acceptance_rate"]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(str(r.get(c, "")) for c in cols) + "\n")


def summary_rows(source: str, names: list[str], s: PosteriorSummary) -> list[dict]:
    rows = []
    for j, name in enumerate(names):
        rows.append(
            {
                "source": source,
                "component": name,
                "count": s.count,
                "mean": repr(float(s.means[j])),
                "std": repr(float(s.stds[j])),
                "q5": repr(float(s.q05[j])),
                "q50": repr(float(s.q50[j])),
                "q95": repr(float(s.q95[j])),
                "acceptance_rate": "" if s.acceptance_rate is None else repr(float(s.acceptance_rate)),
            }
        )
    return rows


HIST_BINS = 64
HIST_HEIGHT = 64


def histogram_counts(values: np.ndarray, bins: int = HIST_BINS) -> tuple[np.ndarray, np.ndarray]:
    """Bin counts over [min, max]; a constant sample gets one central bin."""
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(v, bins=bins, range=(lo, hi))
    return counts, edges


def render_histogram(counts: np.ndarray, height: int = HIST_HEIGHT) -> np.ndarray:
    """Bar-chart image: one column per bin, white bars on black, 8-bit."""
    counts = np.asarray(counts)
    img = np.zeros((height, counts.shape[0]), dtype=np.uint8)
    peak = counts.max()
    if peak == 0:
        return img
    for j, c in enumerate(counts):
        bar = int(round(height * c / peak))
        if bar > 0:
            img[height - bar:, j] = 255
    return img


def write_pgm(path, img: np.ndarray) -> None:
    """Binary (P5) 8-bit PGM."""
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if img.ndim != 2:
        raise ValueError("PGM image must be 2-D")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != b"P5" or parts[2] != b"255":
        raise ValueError(f"{path}: not an 8-bit binary PGM")
    w, h = (int(t) for t in parts[1].split())
    img = np.frombuffer(parts[3][: w * h], dtype=np.uint8)
    if img.size != w * h:
        raise ValueError(f"{path}: truncated pixel data")
    return img.reshape(h, w)


# ---------------------------------------------------------------------------
# x_o and manifest plumbing


def write_xo(path, x_o: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        for v in np.asarray(x_o, dtype=float):
            fh.write(repr(float(v)) + "\n")


def read_xo(path) -> np.ndarray:
    with open(path, "r") as fh:
        try:
            vals = [float(line) for line in fh if line.strip()]
        except ValueError:
            raise ValueError(f"{path}: non-numeric observation value") from None
    if not vals:
        raise ValueError(f"{path}: empty observation file")
    return np.asarray(vals)


def write_manifest(
    out_dir,
    command: str,
    config: dict,
    artifacts: dict,
    results: dict,
    warnings: list[str] | None = None,
    scaling: ScalingSpec | None = None,
) -> str:
    doc = {
        "tool_version": __version__,
        "command": command,
        "config": config,
        "artifacts": artifacts,
        "results": results,
        "warnings": warnings or [],
    }
    if scaling is not None:
        doc["scaling"] = scaling.to_dict()
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _load_config_file(path, allowed: set[str]) -> dict:
    with open(path, "r") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    if "config" in doc and isinstance(doc["config"], dict):
        doc = doc["config"]  # accept a manifest as a config source
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError(f"unknown config key {sorted(unknown)[0]!r} in {path}")
    return doc


def _resolve(ns: argparse.Namespace, defaults: dict) -> dict:
    """Merge CLI flags over config-file values over defaults."""
    allowed = set(defaults)
    file_cfg = _load_config_file(ns.config, allowed) if ns.config else {}
    resolved = {}
    for key, default in defaults.items():
        flag_val = getattr(ns, key, None)
        if flag_val is not None:
            resolved[key] = flag_val
        elif key in file_cfg:
            resolved[key] = file_cfg[key]
        else:
            resolved[key] = default
    return resolved


def _ensure_out(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _get_xo(problem, cfg) -> tuple[np.ndarray, str]:
    """Observation from a file if given, else simulated from theta_star."""
    if cfg.get("x_o"):
        x_o = read_xo(cfg["x_o"])
        if x_o.shape[0] != problem.obs_len:
            raise ValueError(
                f"x_o length {x_o.shape[0]} does not match problem "
                f"{problem.name} ({problem.obs_len})"
            )
        return x_o, cfg["x_o"]
    rng = np.random.default_rng(int(cfg["x_o_seed"]))
    return problem.observe(rng), f"theta_star(seed={cfg['x_o_seed']})"


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_data(ns) -> int:
    cfg = _resolve(
        ns,
        {
            "problem": None,
            "n": DESK_DATASET,
            "seed": 0,
            "x_o_seed": 0,
            "x_o": None,
            "out": None,
        },
    )
    if not cfg["problem"]:
        raise ValueError("gen-data requires --problem")
    problem = get_problem(cfg["problem"])
    out = _ensure_out(cfg["out"])
    x_o, xo_source = _get_xo(problem, cfg)

    ds = build_dataset(
        problem.simulate, problem.prior, x_o, int(cfg["n"]),
        np.random.default_rng(int(cfg["seed"])),
    )
    dataset_path = os.path.join(out, "dataset.csv")
    xo_path = os.path.join(out, "x_o.csv")
    write_dataset_csv(dataset_path, ds)
    write_xo(xo_path, x_o)
    write_manifest(
        out,
        "gen-data",
        cfg,
        artifacts={"dataset": dataset_path, "x_o": xo_path},
        results={
            "n": len(ds),
            "eps_min": ds.scaling.eps_min,
            "eps_max": ds.scaling.eps_max,
            "x_o_source": xo_source,
            "theta_star": problem.theta_star.tolist(),
        },
        scaling=ds.scaling,
    )
    print(
        f"gen-data: {len(ds)} samples of {problem.name}; "
        f"eps in [{ds.scaling.eps_min:g}, {ds.scaling.eps_max:g}] -> {dataset_path}"
    )
    return 0


def cmd_train(ns) -> int:
    cfg = _resolve(
        ns,
        {
            "data": None,
            "problem": None,
            "batch_size": 64,
            "max_epochs": 100,
            "patience": 10,
            "val_fraction": 0.1,
            "learning_rate": 1e-4,
            "seed": 0,
            "out": None,
        },
    )
    if not cfg["data"]:
        raise ValueError("train requires --data (a gen-data output directory)")
    data_dir = cfg["data"]
    dataset_path = os.path.join(data_dir, "dataset.csv")
    gen_manifest_path = os.path.join(data_dir, "manifest.json")
    problem_name = cfg["problem"]
    if problem_name is None and os.path.exists(gen_manifest_path):
        with open(gen_manifest_path) as fh:
            problem_name = json.load(fh)["config"]["problem"]
    if problem_name is None:
        raise ValueError("cannot infer problem; pass --problem")
    problem = get_problem(problem_name)

    theta_raw, eps_raw = read_dataset_csv(dataset_path)
    if theta_raw.shape[1] != problem.prior.dim:
        raise ValueError(
            f"dataset dimension {theta_raw.shape[1]} does not match "
            f"problem {problem_name}"
        )
    scaling = ScalingSpec(
        theta_lower=problem.prior.lower.copy(),
        theta_upper=problem.prior.upper.copy(),
        eps_min=float(eps_raw.min()),
        eps_max=float(eps_raw.max()),
    )
    ds = dataset_from_arrays(theta_raw, eps_raw, scaling)

    tc = TrainConfig(
        batch_size=int(cfg["batch_size"]),
        max_epochs=int(cfg["max_epochs"]),
        patience=int(cfg["patience"]),
        val_fraction=float(cfg["val_fraction"]),
        seed=int(cfg["seed"]),
        learning_rate=float(cfg["learning_rate"]),
    )
    result = train(ds, tc)

    out = _ensure_out(cfg["out"])
    ckpt_path = os.path.join(out, "checkpoint.json")
    save_checkpoint(result.params, ckpt_path, meta={"problem": problem_name})
    write_manifest(
        out,
        "train",
        cfg,
        artifacts={"checkpoint": ckpt_path, "dataset": dataset_path},
        results={
            "epochs_run": result.epochs_run,
            "best_epoch": result.best_epoch,
            "best_val_loss": result.best_val_loss,
            "train_losses": result.train_losses,
            "val_losses": result.val_losses,
        },
        scaling=scaling,
    )
    print(
        f"train: {result.epochs_run} epochs (best {result.best_epoch}, "
        f"val loss {result.best_val_loss:.4f}) -> {ckpt_path}"
    )
    return 0


def cmd_sample(ns) -> int:
    cfg = _resolve(
        ns,
        {
            "checkpoint": None,
            "eps": "min",
            "steps": None,
            "burn_in": None,
            "chains": 1,
            "sigma_scale": 0.05,
            "sigmas": None,
            "theta0": None,
            "desk": False,
            "seed": 0,
            "out": None,
        },
    )
    if not cfg["checkpoint"]:
        raise ValueError("sample requires --checkpoint")
    steps = int(cfg["steps"]) if cfg["steps"] is not None else (DESK_STEPS if cfg["desk"] else PAPER_STEPS)
    burn_in = int(cfg["burn_in"]) if cfg["burn_in"] is not None else (DESK_BURN_IN if cfg["desk"] else PAPER_BURN_IN)

    net, meta = load_checkpoint(cfg["checkpoint"])
    if net.scaling is None:
        raise CheckpointError("checkpoint has no scaling; cannot condition on eps")
    scaling = net.scaling
    prior = Prior(scaling.theta_lower, scaling.theta_upper)

    warnings: list[str] = []
    if cfg["eps"] == "min":
        eps_raw = scaling.eps_min
    else:
        eps_raw = float(cfg["eps"])
    eps_scaled = (eps_raw - scaling.eps_min) / (scaling.eps_max - scaling.eps_min)
    if not 0.0 <= eps_scaled <= 1.0:
        warnings.append(
            f"conditioning eps {eps_raw:g} scales to {eps_scaled:.4f}, outside the "
            f"training range [0, 1]: extrapolation"
        )

    if cfg["sigmas"] is not None:
        sig = np.asarray([float(s) for s in str(cfg["sigmas"]).split(",")])
        proposal = ProposalSpec(sig)
    else:
        proposal = default_proposal(prior, scale=float(cfg["sigma_scale"]))
    if cfg["theta0"] is not None:
        theta0 = np.asarray([float(s) for s in str(cfg["theta0"]).split(",")])
    else:
        theta0 = 0.5 * (prior.lower + prior.upper)  # deterministic default

    ratio_fn = lambda e, th: log_ratio(net, e, th)
    n_chains = int(cfg["chains"])
    labelled = []
    acc_rates = []
    for c in range(n_chains):
        chain = run_chain(
            ratio_fn,
            prior,
            proposal,
            ChainConfig(
                n_steps=steps, burn_in=burn_in, theta0=theta0,
                eps=eps_raw, seed=(int(cfg["seed"]), c),
            ),
        )
        labelled.append((str(c), chain.states))
        acc_rates.append(chain.acceptance_rate)

    out = _ensure_out(cfg["out"])
    chain_path = os.path.join(out, "chain.csv")
    write_chain_csv(chain_path, labelled)
    all_states = np.vstack([s for _, s in labelled])
    summary = summarize_states(all_states, acceptance_rate=float(np.mean(acc_rates)))
    names = [f"theta_{i}" for i in range(all_states.shape[1])]
    summary_path = os.path.join(out, "summary.csv")
    write_summary_csv(summary_path, summary_rows("chain", names, summary))
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    write_manifest(
        out,
        "sample",
        cfg,
        artifacts={"chain": chain_path, "summary": summary_path},
        results={
            "eps_raw": eps_raw,
            "eps_scaled": eps_scaled,
            "steps": steps,
            "burn_in": burn_in,
            "acceptance_rates": acc_rates,
            "posterior_mean": summary.means.tolist(),
            "checkpoint_meta": meta,
        },
        warnings=warnings,
        scaling=scaling,
    )
    print(
        f"sample: {n_chains} chain(s) x {steps} steps at eps={eps_raw:g} "
        f"(scaled {eps_scaled:.4f}), acceptance {np.mean(acc_rates):.3f} -> {chain_path}"
    )
    return 0


def cmd_abc(ns) -> int:
    cfg = _resolve(
        ns,
        {
            "problem": None,
            "threshold": None,
            "target": 10_000,
            "budget": 1_000_000,
            "seed": 0,
            "x_o_seed": 0,
            "x_o": None,
            "out": None,
        },
    )
    if not cfg["problem"]:
        raise ValueError("abc requires --problem")
    if cfg["threshold"] is None:
        raise ValueError("abc requires --threshold (a number or 'inf')")
    problem = get_problem(cfg["problem"])
    threshold = float(cfg["threshold"])
    x_o, xo_source = _get_xo(problem, cfg)

    result = abc_rejection(
        problem.simulate,
        problem.prior,
        x_o,
        AbcConfig(
            threshold=threshold,
            target=int(cfg["target"]),
            budget=int(cfg["budget"]),
            seed=int(cfg["seed"]),
        ),
    )

    out = _ensure_out(cfg["out"])
    accepted_path = os.path.join(out, "accepted.csv")
    write_chain_csv(accepted_path, [("abc", result.accepted)])
    summary = summarize_states(
        result.accepted,
        acceptance_rate=result.accepted.shape[0] / result.simulations_used,
    )
    names = [f"theta_{i}" for i in range(result.accepted.shape[1])]
    summary_path = os.path.join(out, "summary.csv")
    write_summary_csv(summary_path, summary_rows("abc", names, summary))
    write_manifest(
        out,
        "abc",
        cfg,
        artifacts={"accepted": accepted_path, "summary": summary_path},
        results={
            "accepted": int(result.accepted.shape[0]),
            "simulations_used": result.simulations_used,
            "acceptance_rate": result.accepted.shape[0] / result.simulations_used,
            "x_o_source": xo_source,
        },
    )
    print(
        f"abc: {result.accepted.shape[0]} accepted in {result.simulations_used} "
        f"simulations (threshold {threshold:g}) -> {accepted_path}"
    )
    return 0


def cmd_check_eps(ns) -> int:
    cfg = _resolve(
        ns,
        {
            "chain": None,
            "problem": None,
            "checkpoint": None,
            "n_draws": 10_000,
            "seed": 0,
            "x_o_seed": 0,
            "x_o": None,
            "out": None,
        },
    )
    if not cfg["chain"] or not cfg["problem"]:
        raise ValueError("check-eps requires --chain and --problem")
    problem = get_problem(cfg["problem"])
    x_o, xo_source = _get_xo(problem, cfg)
    _, _, thetas = read_chain_csv(cfg["chain"])

    rng = np.random.default_rng(int(cfg["seed"]))
    n_draws = int(cfg["n_draws"])
    idx = rng.integers(0, thetas.shape[0], size=n_draws)
    errs = np.empty(n_draws)
    for k in range(n_draws):
        errs[k] = l1_distance(problem.simulate(thetas[idx[k]], rng), x_o)
    mean_eps = float(errs.mean())
    std_eps = float(errs.std())

    out = _ensure_out(cfg["out"])
    write_manifest(
        out,
        "check-eps",
        cfg,
        artifacts={"chain": cfg["chain"]},
        results={
            "n_draws": n_draws,
            "mean_eps": mean_eps,
            "std_eps": std_eps,
            "x_o_source": xo_source,
            "checkpoint": cfg["checkpoint"],
        },
    )
    print(f"check-eps: mean eps {mean_eps:.4f}, std {std_eps:.4f} over {n_draws} draws")
    return 0


def cmd_report(ns) -> int:
    cfg = _resolve(
        ns,
        {"chains": None, "dataset": None, "out": None},
    )
    if not cfg["chains"] and not cfg["dataset"]:
        raise ValueError("report requires --chains and/or --dataset")
    out = _ensure_out(cfg["out"])
    rows: list[dict] = []
    images: list[str] = []

    for chain_file in cfg["chains"] or []:
        _, _, thetas = read_chain_csv(chain_file)
        stem = os.path.splitext(os.path.basename(chain_file))[0]
        summary = summarize_states(thetas)
        names = [f"theta_{i}" for i in range(thetas.shape[1])]
        rows += summary_rows(chain_file, names, summary)
        for j, name in enumerate(names):
            counts, _ = histogram_counts(thetas[:, j])
            img_path = os.path.join(out, f"{stem}_{name}.pgm")
            write_pgm(img_path, render_histogram(counts))
            images.append(img_path)

    if cfg["dataset"]:
        _, eps_raw = read_dataset_csv(cfg["dataset"])
        stem = os.path.splitext(os.path.basename(cfg["dataset"]))[0]
        summary = summarize_states(eps_raw[:, None])
        rows += summary_rows(cfg["dataset"], ["eps"], summary)
        counts, _ = histogram_counts(eps_raw)
        img_path = os.path.join(out, f"{stem}_eps.pgm")
        write_pgm(img_path, render_histogram(counts))
        images.append(img_path)

    summary_path = os.path.join(out, "summary.csv")
    write_summary_csv(summary_path, rows)
    write_manifest(
        out,
        "report",
        cfg,
        artifacts={"summary": summary_path, "histograms": images},
        results={"rows": len(rows)},
    )
    print(f"report: {len(rows)} summary rows, {len(images)} histograms -> {out}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eglfmcmc",
        description="Error-guided likelihood-free MCMC toolkit",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, help="master seed for the command")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--config", help="JSON config file (flags override)")

    sp = sub.add_parser("gen-data", help="generate a (theta, eps) training set")
    sp.add_argument("--problem", choices=["circle", "linear", "toy"])
    sp.add_argument("--n", type=int, help=f"dataset size (default {DESK_DATASET})")
    sp.add_argument("--x-o", dest="x_o", help="observation file (one value per line)")
    sp.add_argument("--x-o-seed", dest="x_o_seed", type=int,
                    help="seed for simulating x_o from theta_star (default 0)")
    common(sp)
    sp.set_defaults(func=cmd_gen_data)

    sp = sub.add_parser("train", help="train the (eps, theta) classifier")
    sp.add_argument("--data", help="gen-data output directory")
    sp.add_argument("--problem", choices=["circle", "linear", "toy"],
                    help="override the problem recorded in the data manifest")
    sp.add_argument("--batch-size", dest="batch_size", type=int)
    sp.add_argument("--max-epochs", dest="max_epochs", type=int)
    sp.add_argument("--patience", type=int)
    sp.add_argument("--val-fraction", dest="val_fraction", type=float)
    sp.add_argument("--learning-rate", dest="learning_rate", type=float)
    common(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("sample", help="run the error-conditioned MH chain")
    sp.add_argument("--checkpoint")
    sp.add_argument("--eps", help="'min' or a raw error value (default min)")
    sp.add_argument("--steps", type=int, help=f"retained steps (default {PAPER_STEPS})")
    sp.add_argument("--burn-in", dest="burn_in", type=int,
                    help=f"burn-in steps (default {PAPER_BURN_IN})")
    sp.add_argument("--chains", type=int, help="independent chains (default 1)")
    sp.add_argument("--sigma-scale", dest="sigma_scale", type=float,
                    help="proposal sigma as a fraction of each prior range (default 0.05)")
    sp.add_argument("--sigmas", help="comma-separated per-dimension proposal sigmas")
    sp.add_argument("--theta0", help="comma-separated start point (default box midpoint)")
    sp.add_argument("--desk", action="store_const", const=True,
                    help=f"desk preset: {DESK_STEPS} steps, {DESK_BURN_IN} burn-in")
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("abc", help="rejection-ABC baseline")
    sp.add_argument("--problem", choices=["circle", "linear", "toy"])
    sp.add_argument("--threshold", help="acceptance threshold in raw eps units, or 'inf'")
    sp.add_argument("--target", type=int, help="accepted samples wanted (default 10000)")
    sp.add_argument("--budget", type=int, help="max simulations (default 1000000)")
    sp.add_argument("--x-o", dest="x_o")
    sp.add_argument("--x-o-seed", dest="x_o_seed", type=int)
    common(sp)
    sp.set_defaults(func=cmd_abc)

    sp = sub.add_parser("check-eps", help="resimulate chain draws and report eps stats")
    sp.add_argument("--chain", help="chain CSV file")
    sp.add_argument("--problem", choices=["circle", "linear", "toy"])
    sp.add_argument("--checkpoint", help="recorded in the manifest for provenance")
    sp.add_argument("--n-draws", dest="n_draws", type=int)
    sp.add_argument("--x-o", dest="x_o")
    sp.add_argument("--x-o-seed", dest="x_o_seed", type=int)
    common(sp)
    sp.set_defaults(func=cmd_check_eps)

    sp = sub.add_parser("report", help="summaries and PGM histograms from CSVs")
    sp.add_argument("--chains", nargs="+", help="chain CSV files")
    sp.add_argument("--dataset", help="dataset CSV (adds an eps histogram)")
    common(sp)
    sp.set_defaults(func=cmd_report)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except (ValueError, OSError, ZeroAcceptancesError, ScalingError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
