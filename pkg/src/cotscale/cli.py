"""Command-line entry point: one reproducible, seeded subcommand per experiment.

Every subcommand resolves its parameters from defaults, an optional JSON
config file, and command-line flags (in increasing precedence), derives all
randomness from one master seed, and writes self-describing artifacts: each
output file starts with a ``#`` comment carrying the resolved-config hash and
the seed, and a ``run_config.json`` records the full configuration. Re-running
with the same inputs reproduces every file byte for byte.

Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import intrinsic_dim, learner, taskgen, theory, trie
from .rng import derive_seed


def _parse_range(text: str) -> list:
    """Accept 'lo:hi:step' (inclusive endpoints) or a comma list of numbers."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be lo:hi:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ValueError(f"invalid range {text!r}")
        count = int(round((hi - lo) / step))
        values = [lo + i * step for i in range(count + 1)]
        return [v for v in values if v <= hi + 1e-12]
    return [float(p) for p in text.split(",") if p.strip()]


def _parse_int_list(text: str) -> list:
    return [int(p) for p in text.split(",") if p.strip()]


def _config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    config = dict(defaults)
    path = getattr(args, "config", None)
    if path:
        with open(path) as fh:
            file_conf = json.load(fh)
        unknown = set(file_conf) - set(defaults)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        config.update(file_conf)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


def _start_run(config: dict, subcommand: str) -> tuple[Path, str, str]:
    out_dir = Path(config["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    # the hash identifies the experiment, not where it is written
    hashed = {k: v for k, v in config.items() if k != "out_dir"}
    digest = _config_hash({"subcommand": subcommand, **hashed})
    comment = f"config={digest} seed={config['seed']}"
    record = {"config_hash": digest, "subcommand": subcommand, **config}
    with open(out_dir / "run_config.json", "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out_dir, comment, digest


# ---------------------------------------------------------------------------
# theory-grid
# ---------------------------------------------------------------------------

THEORY_DEFAULTS = {
    "kind": "reasoning",
    "d": 3.0,
    "prefactor": 1e-12,
    "m_range": "1.5:10:0.1",
    "n_range": "1:25:0.25",
    "r_range": "1:4:0.05",
    "n": 3,
    "seed": 0,
    "out_dir": "theory_grid_out",
}


def _run_theory_grid(args: argparse.Namespace) -> int:
    config = _resolve(args, THEORY_DEFAULTS)
    params = theory.ErrorModelParams(d=config["d"], prefactor=config["prefactor"])
    m_axis = _parse_range(config["m_range"])
    out_dir, comment, _ = _start_run(config, "theory-grid")
    if config["kind"] == "reasoning":
        grid = theory.reasoning_gain_grid(m_axis, _parse_range(config["n_range"]), params)
    else:
        grid = theory.thinking_gain_grid(
            m_axis, _parse_range(config["r_range"]), config["n"], params
        )
    theory.write_grid_csv(grid, out_dir / "grid.csv", comment=comment)
    theory.write_curve_csv(grid.m_axis, grid.boundary, out_dir / "boundary.csv", comment=comment)
    if grid.optimal is not None:
        theory.write_curve_csv(grid.m_axis, grid.optimal, out_dir / "optimal_r.csv", comment=comment)
    print(f"wrote {config['kind']} grid ({grid.values.shape[0]}x{grid.values.shape[1]}) to {out_dir}")
    print(f"optimal degree for d={config['d']}: {theory.optimal_degree(config['d']):.4f}")
    return 0


# ---------------------------------------------------------------------------
# taskgen
# ---------------------------------------------------------------------------

TASKGEN_DEFAULTS = {
    "m": 3,
    "n": 3,
    "structure_k": None,
    "mode": "reasoning",
    "r": None,
    "count": None,
    "context_dim": 10,
    "seed": 0,
    "out_dir": "taskgen_out",
}


def _run_taskgen(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _resolve(args, TASKGEN_DEFAULTS)
    mode = config["mode"]
    if mode not in taskgen.dataset.MODES:
        parser.error(f"--mode must be one of {taskgen.dataset.MODES}")
    if config["r"] is not None and mode != "thinking":
        parser.error("--r is only valid with --mode thinking")
    if mode == "thinking" and config["structure_k"] is not None:
        parser.error("--structure-k cannot be combined with thinking mode")
    if config["count"] is not None and config["count"] < 1:
        parser.error("--count must be >= 1")
    if mode == "thinking" and config["r"] is None:
        config["r"] = 1.5
    count = config["count"]
    if count is None:
        count = (
            taskgen.DEFAULT_THINKING_COUNT
            if mode == "thinking"
            else taskgen.default_reasoning_count(config["n"])
        )
        config["count"] = count

    out_dir, comment, _ = _start_run(config, "taskgen")
    if config["structure_k"] is not None:
        profile = taskgen.structure_profile(config["m"], config["n"], config["structure_k"])
    else:
        profile = (config["m"],) * config["n"]
    tree = taskgen.generate_tree(profile, config["context_dim"], derive_seed(config["seed"], "tree"))

    if mode == "thinking":
        aug = taskgen.augment_tree(tree, config["r"], derive_seed(config["seed"], "augment"))
        ok, counterexample = taskgen.verify_consistency(aug)
        if not ok:
            raise RuntimeError(f"augmented tree failed verification: {counterexample}")
        taskgen.descriptor.save(aug, out_dir / "tree.txt", comment=comment)
        dataset = taskgen.sample_thinking_dataset(aug, count, derive_seed(config["seed"], "dataset"))
    else:
        taskgen.descriptor.save(tree, out_dir / "tree.txt", comment=comment)
        dataset = taskgen.sample_dataset(tree, count, mode, derive_seed(config["seed"], "dataset"))
    dataset.write(out_dir / "dataset.jsonl", comment=comment)
    print(f"wrote tree descriptor and {count} {mode} samples to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# scaling-sweep
# ---------------------------------------------------------------------------

SWEEP_DEFAULTS = {
    "d_list": "2,4,8",
    "m_list": "8,13,22,35,58,95,156,256",
    "D_list": "4096",
    "replicates": 10,
    "decode": "greedy",
    "test_count": 2000,
    "fixture": False,
    "seed": 0,
    "out_dir": "sweep_out",
}


def _run_scaling_sweep(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _resolve(args, SWEEP_DEFAULTS)
    out_dir, comment, _ = _start_run(config, "scaling-sweep")
    if config["fixture"]:
        x, y = learner.reference_curve_points()
        fit = learner.fit_power_law(x, y)
        learner.write_fit_report_csv(
            [("", "free", fit)], out_dir / "fit_report.csv", comment=comment
        )
        print(
            f"fixture fit: a={fit.a:.6f} b={fit.b:.6f} exponent={fit.exponent:.6f} "
            f"d_estimate={fit.d_estimate:.4f}"
        )
        return 0

    d_list = _parse_int_list(config["d_list"])
    m_list = _parse_int_list(config["m_list"])
    D_list = _parse_int_list(config["D_list"])
    if not d_list or not m_list or not D_list:
        parser.error("--d-list, --m-list and --D-list must be non-empty")
    rows = learner.sweep(
        d_list,
        m_list,
        D_list,
        config["replicates"],
        decode=config["decode"],
        seed=config["seed"],
        test_count=config["test_count"],
    )
    learner.write_sweep_csv(rows, out_dir / "sweep.csv", comment=comment)

    fits = []
    for d in d_list:
        d_rows = [r for r in rows if r["d"] == d]
        means = learner.mean_errors(d_rows, "m")
        if len(means) < 3:
            print(f"d={d}: fewer than 3 degree values, skipping fit")
            continue
        xs = np.array(list(means.keys()), dtype=float)
        ys = np.array(list(means.values()))
        fits.append((d, "fixed", learner.fit_power_law(xs, ys, exponent=2.0 / d)))
        fits.append((d, "free", learner.fit_power_law(xs, ys)))
    if fits:
        learner.write_fit_report_csv(fits, out_dir / "fit_report.csv", comment=comment)
    print(f"wrote {len(rows)} sweep rows and {len(fits)} fits to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# trie-analysis
# ---------------------------------------------------------------------------

TRIE_DEFAULTS = {
    "m_list": "2,3,4,5,6,7,8",
    "n": 2,
    "traces_per_task": None,
    "vocab_size": 500,
    "replicates": 5,
    "tokenize": "bpe",
    "context_dim": 10,
    "seed": 0,
    "out_dir": "trie_out",
}


def _run_trie_analysis(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _resolve(args, TRIE_DEFAULTS)
    m_list = _parse_int_list(config["m_list"])
    if not m_list:
        parser.error("--m-list must be non-empty")
    out_dir, comment, _ = _start_run(config, "trie-analysis")
    correlations = []
    for rep in range(config["replicates"]):
        rep_seed = derive_seed(config["seed"], "trie-rep", rep)
        result = trie.task_vs_trie_degree(
            m_list,
            config["n"],
            traces_per_task=config["traces_per_task"],
            seed=rep_seed,
            vocab_size=config["vocab_size"],
            context_dim=config["context_dim"],
            tokenize=config["tokenize"],
        )
        correlations.append((rep_seed, result.spearman_rho))
        trie.write_degree_report_csv(result, out_dir / f"degree_report_{rep}.csv", comment=comment)
    trie.write_correlation_csv(correlations, out_dir / "correlation.csv", comment=comment)
    rhos = [rho for _, rho in correlations]
    median = float(np.median(rhos))
    print(f"median spearman rho over {len(rhos)} replicates: {median:.3f}")
    return 0


# ---------------------------------------------------------------------------
# dim-estimate
# ---------------------------------------------------------------------------

DIM_DEFAULTS = {
    "input": None,
    "estimator": "pca",
    "threshold": 0.8,
    "neighbors": 10,
    "seed": 0,
    "out_dir": "dim_out",
}


def _run_dim_estimate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _resolve(args, DIM_DEFAULTS)
    if not config["input"]:
        parser.error("--input requires at least one matrix file")
    matrices = [intrinsic_dim.load_matrix(path) for path in config["input"]]
    params = {}
    if config["estimator"] == "pca":
        params["threshold"] = config["threshold"]
    elif config["estimator"] == "mle":
        params["k"] = config["neighbors"]
    out_dir, comment, _ = _start_run(config, "dim-estimate")
    rows = intrinsic_dim.dim_profile(matrices, estimator=config["estimator"], **params)
    intrinsic_dim.write_profile_csv(rows, out_dir / "dim_profile.csv", comment=comment)
    for row in rows:
        print(f"position {row['position']}: dimension {row['dimension']:.3f} "
              f"({row['n_samples']} samples)")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cotscale",
        description="Reproducible experiments on chain-of-thought task decomposition.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, help="master seed; all randomness derives from it")
        p.add_argument("--out-dir", dest="out_dir", help="directory for all output files")
        p.add_argument("--config", help="JSON file with defaults for any flag")

    p = sub.add_parser(
        "theory-grid",
        help="evaluate decomposition/extra-depth gain formulas over a grid",
        description="Evaluate the closed-form gain of decomposing a task over a "
        "(degree, depth) or (degree, depth-factor) grid and export the grid plus "
        "zero-gain boundary and optimal-depth-factor curves as CSV.",
    )
    p.add_argument("--kind", choices=["reasoning", "thinking"])
    p.add_argument("--d", type=float, help="intrinsic dimension")
    p.add_argument("--prefactor", type=float, help="combined error prefactor")
    p.add_argument("--m-range", dest="m_range", help="degree axis, lo:hi:step or comma list")
    p.add_argument("--n-range", dest="n_range", help="depth axis (reasoning kind)")
    p.add_argument("--r-range", dest="r_range", help="depth-factor axis (thinking kind)")
    p.add_argument("--n", type=int, help="base depth (thinking kind)")
    common(p)

    p = sub.add_parser(
        "taskgen",
        help="generate a deduction tree and a serialized dataset",
        description="Generate a random deduction tree (optionally depth-stretched "
        "for thinking mode), write its descriptor, and sample a JSONL dataset of "
        "prompt/trace pairs.",
    )
    p.add_argument("--m", type=int, help="degree per level")
    p.add_argument("--n", type=int, help="depth")
    p.add_argument("--structure-k", dest="structure_k", type=int,
                   help="structure index 1..n: m-ary for k-1 levels, one big branch, then trivial")
    p.add_argument("--mode", choices=list(taskgen.dataset.MODES))
    p.add_argument("--r", type=float, help="depth factor (thinking mode; r*n must be integer)")
    p.add_argument("--count", type=int, help="number of samples")
    p.add_argument("--context-dim", dest="context_dim", type=int, help="context vector length")
    common(p)

    p = sub.add_parser(
        "scaling-sweep",
        help="classification-error sweep over class counts and data sizes",
        description="Measure memorizer test error on the sphere teacher over a "
        "(dimension, class count, data size) grid, then fit power laws to the "
        "mean errors. --fixture fits the built-in reference curve instead.",
    )
    p.add_argument("--d-list", dest="d_list", help="comma list of input dimensions")
    p.add_argument("--m-list", dest="m_list", help="comma list of class counts")
    p.add_argument("--D-list", dest="D_list", help="comma list of training-set sizes")
    p.add_argument("--replicates", type=int)
    p.add_argument("--decode", choices=["greedy", "sample"])
    p.add_argument("--test-count", dest="test_count", type=int)
    p.add_argument("--fixture", action="store_const", const=True,
                   help="fit the built-in reference error curve and exit")
    common(p)

    p = sub.add_parser(
        "trie-analysis",
        help="correlate task degree with tokenized-trace trie branching",
        description="For each task degree, tokenize all deduction traces, build "
        "a prefix trie, and report branching statistics plus the rank "
        "correlation between task degree and trie degree.",
    )
    p.add_argument("--m-list", dest="m_list", help="comma list of task degrees")
    p.add_argument("--n", type=int, help="tree depth")
    p.add_argument("--traces-per-task", dest="traces_per_task", type=int,
                   help="cap on traces per task (all when omitted)")
    p.add_argument("--vocab-size", dest="vocab_size", type=int)
    p.add_argument("--replicates", type=int, help="independent seeds to aggregate")
    p.add_argument("--tokenize", choices=["bpe", "bytes"])
    p.add_argument("--context-dim", dest="context_dim", type=int)
    common(p)

    p = sub.add_parser(
        "dim-estimate",
        help="estimate intrinsic dimension of embedding matrices",
        description="Estimate the intrinsic dimension of one or more embedding "
        "matrices (.npy or text with a 'rows cols' header), one position per "
        "file, and write the profile as CSV.",
    )
    p.add_argument("--input", nargs="+", help="matrix files, one per position")
    p.add_argument("--estimator", choices=["pca", "mle", "twonn"])
    p.add_argument("--threshold", type=float, help="variance fraction for pca")
    p.add_argument("--neighbors", type=int, help="neighbor count for mle")
    common(p)

    return parser


_HANDLERS = {
    "theory-grid": lambda args, parser: _run_theory_grid(args),
    "taskgen": _run_taskgen,
    "scaling-sweep": _run_scaling_sweep,
    "trie-analysis": _run_trie_analysis,
    "dim-estimate": _run_dim_estimate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _HANDLERS[args.subcommand]
    try:
        return handler(args, parser)
    except (OSError, ValueError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
