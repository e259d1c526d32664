"""Command-line surface: joint, decompose, fuse, generate, eval, sweep.

Exit codes partition the error classes: 0 success, 2 usage, 3 validation
or shape, 4 I/O or file format, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import DimensionError, FormatError, NumericalError, ValidationError
from .fusion import AttentionParams, fuse, params_from_matrix
from .matrixio import (
    FORMAT_VERSION,
    align_rows,
    center_columns,
    input_record,
    matrix_extension,
    output_record,
    parse_config_file,
    read_matrix,
    write_manifest,
    write_matrix,
)
from .solvers import (
    JointState,
    SolverConfig,
    joint_decompose,
    joint_step,
    lmr_decompose,
    residuals,
)
from .synth import GENERATOR_ID, SyntheticInstance, SyntheticSpec, component_metrics, generate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4
EXIT_NUMERICAL = 5


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _fmt(v: float) -> str:
    return repr(float(v))


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lambda_", type=float, default=None,
                   help="sparse penalty weight (default 1.0)")
    p.add_argument("--mu", type=float, default=None,
                   help="quadratic penalty weight (default 10.0)")
    p.add_argument("--max-iters", type=int, default=None,
                   help="iteration cap (default 3000)")
    p.add_argument("--epsilon", type=float, default=None,
                   help="residual tolerance (default 1e-7)")
    p.add_argument("--config", default=None,
                   help="flat key = value config file (flags take precedence)")


def _add_ingest_flags(p: argparse.ArgumentParser, pair: bool) -> None:
    if pair:
        p.add_argument("--align", choices=("truncate", "mean-pool"), default=None,
                       help="how to equalize differing row counts")
    p.add_argument("--center", action="store_true",
                   help="subtract each column's mean after ingestion")


def _resolve_config(ns: argparse.Namespace) -> SolverConfig:
    file_values = parse_config_file(ns.config) if ns.config else {}

    def pick(flag, key, default):
        return flag if flag is not None else file_values.get(key, default)

    return SolverConfig(
        lam=pick(ns.lambda_, "lambda", 1.0),
        mu=pick(ns.mu, "mu", 10.0),
        max_iters=pick(ns.max_iters, "max_iters", 3000),
        epsilon=pick(ns.epsilon, "epsilon", 1e-7),
    )


def _config_echo(cfg: SolverConfig) -> dict:
    return {
        "lambda": cfg.lam,
        "mu": cfg.mu,
        "max_iters": cfg.max_iters,
        "epsilon": cfg.epsilon,
    }


def _load_pair(ns: argparse.Namespace):
    i = read_matrix(ns.input_i)
    t = read_matrix(ns.input_t)
    if i.shape[1] != t.shape[1]:
        raise DimensionError(
            f"column counts differ: i is {i.shape[0]}x{i.shape[1]}, t is {t.shape[0]}x{t.shape[1]}"
        )
    if i.shape[0] != t.shape[0]:
        if ns.align is None:
            raise DimensionError(
                f"row counts differ ({i.shape[0]} vs {t.shape[0]}); pass --align truncate|mean-pool"
            )
        target = min(i.shape[0], t.shape[0])
        i = align_rows(i, target, ns.align)
        t = align_rows(t, target, ns.align)
    if ns.center:
        i = center_columns(i)
        t = center_columns(t)
    return i, t


def _write_residual_history(path, history) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        if history and isinstance(history[0], tuple):
            fh.write("iteration,r_i,r_t\n")
            for k, (r_i, r_t) in enumerate(history, 1):
                fh.write(f"{k},{r_i:.17g},{r_t:.17g}\n")
        else:
            fh.write("iteration,r\n")
            for k, r in enumerate(history, 1):
                fh.write(f"{k},{r:.17g}\n")


def _read_named_matrix(directory, names: tuple[str, ...]):
    for name in names:
        for ext in (".rdm", ".csv"):
            p = Path(directory) / f"{name}{ext}"
            if p.exists():
                return read_matrix(p)
    tried = ", ".join(f"{n}{e}" for n in names for e in (".rdm", ".csv"))
    raise FormatError(f"no {names[0]} matrix found in {directory} (tried {tried})")


def _load_truth(directory) -> SyntheticInstance:
    l0 = _read_named_matrix(directory, ("L0",))
    s_i0 = _read_named_matrix(directory, ("S_I0",))
    s_t0 = _read_named_matrix(directory, ("S_T0",))
    return SyntheticInstance(i=l0 + s_i0, t=l0 + s_t0, l0=l0, s_i0=s_i0, s_t0=s_t0)


def cmd_joint(ns: argparse.Namespace) -> int:
    started = _utc_now()
    t0 = time.perf_counter()
    i, t = _load_pair(ns)
    cfg = _resolve_config(ns)
    res = joint_decompose(i, t, cfg)

    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = matrix_extension(ns.format)
    paths = {name: out_dir / f"{name}{ext}" for name in ("L", "S_I", "S_T")}
    write_matrix(paths["L"], res.l, ns.format)
    write_matrix(paths["S_I"], res.s_i, ns.format)
    write_matrix(paths["S_T"], res.s_t, ns.format)
    residuals_path = out_dir / "residuals.csv"
    _write_residual_history(residuals_path, res.residual_history)

    r_i, r_t = res.residual_history[-1]
    manifest = {
        "format_version": FORMAT_VERSION,
        "tool": "lrfusion",
        "version": __version__,
        "command": "joint",
        "config": _config_echo(cfg),
        "options": {"format": ns.format, "align": ns.align, "center": bool(ns.center)},
        "inputs": {"i": input_record(ns.input_i), "t": input_record(ns.input_t)},
        "outputs": {
            "l": output_record(paths["L"]),
            "s_i": output_record(paths["S_I"]),
            "s_t": output_record(paths["S_T"]),
            "residuals": output_record(residuals_path),
        },
        "result": {
            "iterations_run": res.iterations_run,
            "converged": res.converged,
            "final_residual_i": r_i,
            "final_residual_t": r_t,
        },
        "timing": {"started_utc": started, "wall_clock_seconds": time.perf_counter() - t0},
    }
    write_manifest(out_dir / "manifest.json", manifest)

    print(f"converged={'true' if res.converged else 'false'}")
    print(f"iterations={res.iterations_run}")
    print(f"final_residual_i={_fmt(r_i)}")
    print(f"final_residual_t={_fmt(r_t)}")
    return EXIT_OK


def cmd_decompose(ns: argparse.Namespace) -> int:
    started = _utc_now()
    t0 = time.perf_counter()
    x = read_matrix(ns.input)
    if ns.center:
        x = center_columns(x)
    cfg = _resolve_config(ns)
    svt_tau = ns.svt_tau if ns.svt_tau is not None else 1.0 / cfg.mu
    res = lmr_decompose(x, cfg, svt_tau)

    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = matrix_extension(ns.format)
    l_path = out_dir / f"L{ext}"
    s_path = out_dir / f"S{ext}"
    write_matrix(l_path, res.l, ns.format)
    write_matrix(s_path, res.s, ns.format)
    residuals_path = out_dir / "residuals.csv"
    _write_residual_history(residuals_path, res.residual_history)

    manifest = {
        "format_version": FORMAT_VERSION,
        "tool": "lrfusion",
        "version": __version__,
        "command": "decompose",
        "config": _config_echo(cfg),
        "options": {"format": ns.format, "center": bool(ns.center), "svt_tau": float(svt_tau)},
        "inputs": {"x": input_record(ns.input)},
        "outputs": {
            "l": output_record(l_path),
            "s": output_record(s_path),
            "residuals": output_record(residuals_path),
        },
        "result": {
            "iterations_run": res.iterations_run,
            "converged": res.converged,
            "final_residual": res.residual_history[-1],
        },
        "timing": {"started_utc": started, "wall_clock_seconds": time.perf_counter() - t0},
    }
    write_manifest(out_dir / "manifest.json", manifest)

    print(f"converged={'true' if res.converged else 'false'}")
    print(f"iterations={res.iterations_run}")
    print(f"final_residual={_fmt(res.residual_history[-1])}")
    return EXIT_OK


def cmd_fuse(ns: argparse.Namespace) -> int:
    started = _utc_now()
    t0 = time.perf_counter()
    l = read_matrix(ns.l)
    s_i = read_matrix(ns.s_i)
    s_t = read_matrix(ns.s_t)
    if ns.params is not None:
        params = params_from_matrix(read_matrix(ns.params), expected_size=l.size)
    else:
        params = AttentionParams.zeros(l.size)
    result = fuse(l, s_i, s_t, params)

    out = Path(ns.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_matrix(out, result.r, ns.format)

    weights = {
        "alpha_l": result.weights[0],
        "alpha_i": result.weights[1],
        "alpha_t": result.weights[2],
        "s_l": result.scores[0],
        "s_i": result.scores[1],
        "s_t": result.scores[2],
    }
    inputs = {"l": input_record(ns.l), "s_i": input_record(ns.s_i), "s_t": input_record(ns.s_t)}
    if ns.params is not None:
        inputs["params"] = input_record(ns.params)
    manifest = {
        "format_version": FORMAT_VERSION,
        "tool": "lrfusion",
        "version": __version__,
        "command": "fuse",
        "options": {"format": ns.format},
        "inputs": inputs,
        "outputs": {"r": output_record(out)},
        "result": weights,
        "timing": {"started_utc": started, "wall_clock_seconds": time.perf_counter() - t0},
    }
    write_manifest(Path(str(out) + ".manifest.json"), manifest)

    for key, value in weights.items():
        print(f"{key}={_fmt(value)}")
    return EXIT_OK


def cmd_generate(ns: argparse.Namespace) -> int:
    started = _utc_now()
    t0 = time.perf_counter()
    spec = SyntheticSpec(
        rows=ns.rows,
        cols=ns.cols,
        rank=ns.rank,
        density=ns.density,
        low_rank_scale=ns.low_rank_scale,
        spike_scale=ns.spike_scale,
        seed=ns.seed,
    )
    inst = generate(spec)

    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = matrix_extension(ns.format)
    matrices = {"I": inst.i, "T": inst.t, "L0": inst.l0, "S_I0": inst.s_i0, "S_T0": inst.s_t0}
    outputs = {}
    for name, matrix in matrices.items():
        path = out_dir / f"{name}{ext}"
        write_matrix(path, matrix, ns.format)
        outputs[name.lower()] = output_record(path)

    meta = {"format_version": FORMAT_VERSION, "generator": GENERATOR_ID, "spec": asdict(spec)}
    write_manifest(out_dir / "meta.json", meta)

    manifest = {
        "format_version": FORMAT_VERSION,
        "tool": "lrfusion",
        "version": __version__,
        "command": "generate",
        "options": {"format": ns.format},
        "spec": asdict(spec),
        "generator": GENERATOR_ID,
        "outputs": outputs,
        "timing": {"started_utc": started, "wall_clock_seconds": time.perf_counter() - t0},
    }
    write_manifest(out_dir / "manifest.json", manifest)
    return EXIT_OK


def cmd_eval(ns: argparse.Namespace) -> int:
    est_l = _read_named_matrix(ns.est_dir, ("L", "L0"))
    est_s_i = _read_named_matrix(ns.est_dir, ("S_I", "S_I0"))
    est_s_t = _read_named_matrix(ns.est_dir, ("S_T", "S_T0"))
    truth = _load_truth(ns.truth_dir)
    metrics = component_metrics(est_l, est_s_i, est_s_t, truth)
    for key, value in metrics.as_dict().items():
        print(f"{key}={value if isinstance(value, int) else _fmt(value)}")
    return EXIT_OK


def cmd_sweep(ns: argparse.Namespace) -> int:
    started = _utc_now()
    t0 = time.perf_counter()
    i, t = _load_pair(ns)
    cfg = _resolve_config(ns)
    checkpoints = ns.checkpoints
    truth = _load_truth(ns.truth_dir) if ns.truth_dir else None

    state = JointState.zeros(*i.shape)
    k = 0
    converged = False
    r = residuals(state, i, t)
    rows = []
    metric_rows = []
    for cp in checkpoints:
        while k < cp and not converged:
            state = joint_step(state, i, t, cfg)
            k += 1
            r = residuals(state, i, t)
            if max(r) < cfg.epsilon:
                converged = True
        rows.append((cp, k, r[0], r[1]))
        if truth is not None:
            metric_rows.append((cp, component_metrics(state.l, state.s_i, state.s_t, truth)))

    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_path = out_dir / "sweep.csv"
    with open(sweep_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("checkpoint,iteration,r_i,r_t\n")
        for cp, it, r_i, r_t in rows:
            fh.write(f"{cp},{it},{r_i:.17g},{r_t:.17g}\n")
    outputs = {"sweep": output_record(sweep_path)}

    if truth is not None:
        metrics_path = out_dir / "sweep_metrics.csv"
        keys = list(metric_rows[0][1].as_dict())
        with open(metrics_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("checkpoint," + ",".join(keys) + "\n")
            for cp, metrics in metric_rows:
                values = metrics.as_dict()
                cells = [str(values[key]) if isinstance(values[key], int) else f"{values[key]:.17g}"
                         for key in keys]
                fh.write(f"{cp}," + ",".join(cells) + "\n")
        outputs["sweep_metrics"] = output_record(metrics_path)

    inputs = {"i": input_record(ns.input_i), "t": input_record(ns.input_t)}
    if ns.truth_dir:
        inputs["truth_dir"] = {"path": str(ns.truth_dir)}
    manifest = {
        "format_version": FORMAT_VERSION,
        "tool": "lrfusion",
        "version": __version__,
        "command": "sweep",
        "config": _config_echo(cfg),
        "options": {
            "align": ns.align,
            "center": bool(ns.center),
            "checkpoints": checkpoints,
        },
        "inputs": inputs,
        "outputs": outputs,
        "result": {
            "iterations_run": k,
            "converged": converged,
            "final_residual_i": r[0],
            "final_residual_t": r[1],
        },
        "timing": {"started_utc": started, "wall_clock_seconds": time.perf_counter() - t0},
    }
    write_manifest(out_dir / "manifest.json", manifest)

    for cp, it, r_i, r_t in rows:
        print(f"checkpoint={cp} iteration={it} r_i={_fmt(r_i)} r_t={_fmt(r_t)}")
    return EXIT_OK


def _checkpoint_list(text: str) -> list[int]:
    values = [int(v) for v in text.split(",") if v.strip()]
    if not values or any(v < 1 for v in values):
        raise ValueError("checkpoints must be positive integers")
    return sorted(set(values))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrfusion",
        description="Shared low-rank + sparse decomposition of paired matrices, "
                    "with attention-weighted fusion.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("joint", help="decompose a matrix pair into shared L plus S_I, S_T")
    p.add_argument("--input-i", required=True)
    p.add_argument("--input-t", required=True)
    p.add_argument("--out-dir", required=True)
    _add_solver_flags(p)
    _add_ingest_flags(p, pair=True)
    p.add_argument("--format", choices=("rdm", "csv"), default="rdm")
    p.set_defaults(handler=cmd_joint)

    p = sub.add_parser("decompose", help="decompose a single matrix into L plus S")
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", required=True)
    _add_solver_flags(p)
    _add_ingest_flags(p, pair=False)
    p.add_argument("--svt-tau", type=float, default=None,
                   help="singular value threshold (default 1/mu)")
    p.add_argument("--format", choices=("rdm", "csv"), default="rdm")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("fuse", help="attention-fuse L, S_I, S_T into R")
    p.add_argument("--l", required=True)
    p.add_argument("--s-i", required=True)
    p.add_argument("--s-t", required=True)
    p.add_argument("--params", default=None,
                   help="1x(m*n+1) params matrix, bias last; omitted = uniform weights")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("rdm", "csv"), default="rdm")
    p.set_defaults(handler=cmd_fuse)

    p = sub.add_parser("generate", help="generate a synthetic instance with ground truth")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--low-rank-scale", type=float, default=1.0)
    p.add_argument("--spike-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--format", choices=("rdm", "csv"), default="rdm")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("eval", help="score an estimate directory against a truth directory")
    p.add_argument("--est-dir", required=True)
    p.add_argument("--truth-dir", required=True)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("sweep", help="residuals (and metrics) at iteration checkpoints")
    p.add_argument("--input-i", required=True)
    p.add_argument("--input-t", required=True)
    p.add_argument("--out-dir", required=True)
    _add_solver_flags(p)
    _add_ingest_flags(p, pair=True)
    p.add_argument("--checkpoints", type=_checkpoint_list, default=[1000, 2000, 3000, 4000],
                   help="comma-separated iteration checkpoints")
    p.add_argument("--truth-dir", default=None,
                   help="directory with L0/S_I0/S_T0 for per-checkpoint metrics")
    p.set_defaults(handler=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.handler(ns)
    except (DimensionError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
