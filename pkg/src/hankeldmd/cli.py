"""Command-line front end.

    hankeldmd simulate --generator unicycle/gaussian --output sim/
    hankeldmd run --input sim/noisy.csv --truth sim/clean.csv --output sim/records.jsonl
    hankeldmd score --pred sim/records.jsonl --truth sim/clean.csv --output sim/score.json
    hankeldmd sweep --generator unicycle/ar1laplace --seeds 0,1,2 --output sweep/

Every flag can also be set through an environment variable named
``HANKELDMD_<FLAG>`` (upper case, dashes as underscores), e.g.
``HANKELDMD_CADZOW_ITERS=5``. Command-line values win.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .csvio import dumps, iter_records, iter_samples, read_samples, step_record, write_samples
from .errors import HankelDMDError, IndexMismatch, InvalidConfig
from .metrics import DenoiseAccumulator, ViolationAccumulator, violation_duration
from .pipeline import Pipeline, PipelineConfig
from .simgen import NoiseModel, UnicycleProfile, add_noise, lti_stream, unicycle_velocity

log = logging.getLogger("hankeldmd")

ENV_PREFIX = "HANKELDMD_"
GENERATORS = ("unicycle/gaussian", "unicycle/ar1laplace", "lti")
EMIT_CHOICES = ("forecasts", "spectra", "denoised", "reports")

# damped rotation plus a slow decaying mode; used when no --lti-system is given
DEFAULT_LTI = {
    "A": [[0.99 * np.cos(0.1), -0.99 * np.sin(0.1), 0.0], [0.99 * np.sin(0.1), 0.99 * np.cos(0.1), 0.0], [0.0, 0.0, 0.97]],
    "C": [[1.0, 0.5, 1.0]],
    "z0": [1.0, 0.0, 1.0],
}


# --- argument parsing -----------------------------------------------------------


def _env_default(flag: str, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper())
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise InvalidConfig(f"environment override for {flag} has invalid value {raw!r}") from None


def _add(p: argparse.ArgumentParser, flag: str, default, cast=str, **kw):
    p.add_argument(flag, default=_env_default(flag, default, cast), type=cast, **kw)


def _emit_list(text: str) -> list[str]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in items if s not in EMIT_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown --emit value(s) {bad}; choose from {EMIT_CHOICES}")
    return items


def _seed_list(text: str) -> list[int]:
    return [int(s) for s in text.split(",") if s.strip()]


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    d = PipelineConfig()
    _add(p, "--L", d.L, int, help="embedding window length (default %(default)s)")
    _add(p, "--N", d.N, int, help="buffer length; a multiple of L with N/L >= L*n_x (default %(default)s)")
    _add(p, "--horizon", d.horizon, int, help="forecast steps per window (default %(default)s)")
    _add(p, "--cadzow-iters", d.cadzow_iters, int, help="Cadzow iterations per window (default %(default)s)")
    _add(p, "--dt", d.dt, float, help="sample period in seconds (default %(default)s)")
    _add(p, "--epsilon", 0.04, float, help="forecast error tolerance for the violation metric (default %(default)s)")
    _add(p, "--emit", [], _emit_list, help=f"comma list of extra outputs: {','.join(EMIT_CHOICES)}")


def _sim_flags(p: argparse.ArgumentParser) -> None:
    prof = UnicycleProfile()
    _add(p, "--generator", GENERATORS[0], str, choices=GENERATORS)
    _add(p, "--amplitude", prof.amplitude, float, help="figure-eight amplitude, m")
    _add(p, "--period", prof.period, float, help="figure-eight period, s")
    _add(p, "--duration", prof.duration, float, help="run length, s")
    _add(p, "--sigma", 0.25, float, help="stationary noise standard deviation")
    _add(p, "--rho", 0.8, float, help="AR(1) coefficient for ar1laplace noise")
    _add(p, "--lti-system", None, str, help="JSON file with A, C, z0 for the lti generator")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hankeldmd", description="Sliding-window denoising and forecasting of sensor streams.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write clean.csv, noisy.csv and manifest.json")
    _sim_flags(p)
    _add(p, "--dt", UnicycleProfile().dt, float, help="sample period, s")
    _add(p, "--seed", 0, int)
    _add(p, "--output", None, str, required=_env_default("--output", None) is None, help="output directory")

    p = sub.add_parser("run", help="stream a CSV through the pipeline, writing JSON-lines records")
    _pipeline_flags(p)
    _add(p, "--input", None, str, required=_env_default("--input", None) is None)
    _add(p, "--truth", None, str, help="clean CSV used for the summary line and reports")
    _add(p, "--output", None, str, required=_env_default("--output", None) is None, help="records .jsonl path")
    _add(p, "--seed", 0, int, help="recorded in the manifest")

    p = sub.add_parser("score", help="score a records file against ground truth")
    _add(p, "--pred", None, str, required=_env_default("--pred", None) is None)
    _add(p, "--truth", None, str, required=_env_default("--truth", None) is None)
    _add(p, "--epsilon", 0.04, float)
    _add(p, "--dt", PipelineConfig().dt, float)
    _add(p, "--output", None, str, help="report .json path (default: print only)")

    p = sub.add_parser("sweep", help="simulate, run and score one scenario per seed")
    _sim_flags(p)
    _pipeline_flags(p)
    _add(p, "--seeds", [0, 1, 2], _seed_list, help="comma list of seeds")
    _add(p, "--jobs", 1, int, help="scenarios run concurrently")
    _add(p, "--output", None, str, required=_env_default("--output", None) is None, help="output directory")
    return parser


# --- simulate -------------------------------------------------------------------


def _load_lti(path: Optional[str]) -> dict:
    if path is None:
        return DEFAULT_LTI
    try:
        system = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidConfig(f"cannot read LTI system file {path}: {exc}") from None
    missing = {"A", "C", "z0"} - set(system)
    if missing:
        raise InvalidConfig(f"LTI system file {path} lacks {sorted(missing)}")
    return system


def simulate(args) -> dict:
    """Generate a scenario; returns the manifest that was written."""
    out = Path(args.output)
    if not args.duration > 0:
        raise InvalidConfig(f"--duration must be > 0, got {args.duration}")
    prof = UnicycleProfile(args.amplitude, args.period, args.dt, args.duration)
    manifest = {
        "command": "simulate",
        "version": __version__,
        "generator": args.generator,
        "seed": args.seed,
        "dt": args.dt,
        "duration": args.duration,
        "sigma": args.sigma,
    }
    if args.generator == "lti":
        if not args.dt > 0:
            raise InvalidConfig("--dt must be > 0")
        system = _load_lti(args.lti_system)
        clean = lti_stream(system["A"], system["C"], system["z0"], int(round(args.duration / args.dt)))
        manifest["lti"] = {k: np.asarray(system[k], dtype=float).tolist() for k in ("A", "C", "z0")}
        # noise-free oracle stream: noisy.csv equals clean.csv
        noisy = clean.copy()
        manifest["sigma"] = 0.0
    else:
        try:
            clean = unicycle_velocity(prof)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        kind = args.generator.split("/", 1)[1]
        try:
            model = NoiseModel(kind, args.sigma, args.rho, args.seed)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        noisy = add_noise(clean, model)
        manifest.update(amplitude=args.amplitude, period=args.period, noise=kind)
        if kind == "ar1laplace":
            manifest["rho"] = args.rho
    out.mkdir(parents=True, exist_ok=True)
    write_samples(out / "clean.csv", clean)
    write_samples(out / "noisy.csv", noisy)
    manifest["rows"] = int(len(clean))
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


# --- run --------------------------------------------------------------------------


def _config_from(args, n_x: int) -> PipelineConfig:
    return PipelineConfig(L=args.L, N=args.N, n_x=n_x, horizon=args.horizon, cadzow_iters=args.cadzow_iters, dt=args.dt)


def _sidecar(output: Path, suffix: str) -> Path:
    return output.with_name(output.stem + suffix)


def _peek_width(path: str) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline()
    except OSError as exc:
        raise InvalidConfig(f"cannot read input {path}: {exc}") from None
    return max(len(header.strip().split(",")) - 1, 0)


def _csv_line(values) -> str:
    return ",".join("" if v is None else (str(v) if isinstance(v, (int, np.integer)) else repr(float(v))) for v in values) + "\n"


def run(args) -> Optional[dict]:
    """Stream ``--input`` through a pipeline; returns the summary when truth is given."""
    output = Path(args.output)
    n_x = _peek_width(args.input)
    if n_x < 1:
        raise InvalidConfig(f"{args.input}: header needs an index column and at least one value column")
    cfg = _config_from(args, n_x)
    emit = set(args.emit)
    if args.truth is not None and not Path(args.truth).exists():
        raise IndexMismatch(f"truth file not found: {args.truth}")
    output.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": "run",
        "version": __version__,
        "input": str(args.input),
        "truth": None if args.truth is None else str(args.truth),
        "output": str(output),
        "seed": args.seed,
        "epsilon": args.epsilon,
        "emit": sorted(emit),
        "config": {"L": cfg.L, "N": cfg.N, "n_x": cfg.n_x, "horizon": cfg.horizon, "cadzow_iters": cfg.cadzow_iters, "dt": cfg.dt},
    }
    _sidecar(output, ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    pipe = Pipeline(cfg, keep_model="spectra" in emit)
    truth_iter = iter_samples(args.truth) if args.truth is not None else None
    den_acc = DenoiseAccumulator()
    vio_acc = ViolationAccumulator(cfg.dt, args.epsilon)
    pending: deque = deque()  # (origin index, forecasts) awaiting truth; at most `horizon` entries
    n_records = 0

    sidecars = {}
    try:
        if "forecasts" in emit:
            sidecars["forecasts"] = open(_sidecar(output, ".forecasts.csv"), "w", encoding="utf-8")
            sidecars["forecasts"].write(",".join(["origin", "step", "target", "time"] + [f"x{k}" for k in range(n_x)]) + "\n")
        if "spectra" in emit:
            sidecars["spectra"] = open(_sidecar(output, ".spectra.csv"), "w", encoding="utf-8")
            sidecars["spectra"].write("t,k,real,imag,modulus\n")
        if "denoised" in emit:
            sidecars["denoised"] = open(_sidecar(output, ".denoised.csv"), "w", encoding="utf-8")
            cols = [f"measurement{k}" for k in range(n_x)] + [f"denoised{k}" for k in range(n_x)]
            if truth_iter is not None:
                cols += [f"truth{k}" for k in range(n_x)]
            sidecars["denoised"].write(",".join(["index", "time"] + cols) + "\n")

        with open(output, "w", encoding="utf-8") as fh:
            for idx, x in iter_samples(args.input):
                if x.shape[0] != n_x:
                    raise InvalidConfig(f"{args.input}: index {idx} has {x.shape[0]} values, expected {n_x}")
                truth_now = None
                if truth_iter is not None:
                    try:
                        t_idx, truth_now = next(truth_iter)
                    except StopIteration:
                        raise IndexMismatch(f"{args.truth} ends before input index {idx}") from None
                    if t_idx != idx:
                        raise IndexMismatch(f"{args.truth}: index {t_idx} does not match input index {idx}")
                    while pending and pending[0][0] + cfg.horizon < idx:
                        pending.popleft()
                    for origin, values in pending:
                        j = idx - origin
                        if 1 <= j <= len(values):
                            vio_acc.add(values[j - 1 : j], truth_now[None, :])
                step = pipe.push(x)
                if step is None:
                    continue
                fh.write(dumps(step_record(step, idx, spectra="spectra" in emit)) + "\n")
                n_records += 1
                if truth_now is not None:
                    den_acc.add(truth_now, x, step.denoised_current)
                    pending.append((idx, step.forecast.values))
                if "forecasts" in sidecars:
                    for j, row in enumerate(step.forecast.values, start=1):
                        sidecars["forecasts"].write(_csv_line([idx, j, idx + j, (idx + j) * cfg.dt, *row]))
                if "spectra" in sidecars and step.model is not None and step.model.eigenvalues is not None:
                    for k, z in enumerate(step.model.eigenvalues):
                        sidecars["spectra"].write(_csv_line([idx, k, z.real, z.imag, abs(z)]))
                if "denoised" in sidecars:
                    row = [idx, idx * cfg.dt, *x, *step.denoised_current]
                    if truth_now is not None:
                        row += list(truth_now)
                    sidecars["denoised"].write(_csv_line(row))

            summary = None
            if n_records == 0:
                log.warning("input shorter than the buffer (N=%d): no records written", cfg.N)
            elif truth_iter is not None:
                summary = {
                    "records": n_records,
                    "denoise": den_acc.report().to_dict(),
                    "violation_run": vio_acc.report().to_dict() if vio_acc.steps else None,
                }
                fh.write(dumps({"summary": _json_safe(summary)}) + "\n")
    finally:
        for f in sidecars.values():
            f.close()

    if "reports" in emit:
        if summary is None:
            log.warning("--emit reports needs --truth and at least one record; skipped")
        else:
            _sidecar(output, ".report.json").write_text(json.dumps(_json_safe(summary), indent=2) + "\n", encoding="utf-8")
    return summary


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else None)
    return obj


# --- score ------------------------------------------------------------------------


def score(pred_path: str, truth_path: str, epsilon: float, dt: float) -> dict:
    """Denoising and forecast-violation report for a records file."""
    for p in (pred_path, truth_path):
        if not Path(p).exists():
            raise IndexMismatch(f"file not found: {p}")
    idx, values = read_samples(truth_path)
    pos = {int(i): k for k, i in enumerate(idx)}
    den_acc = DenoiseAccumulator()
    run_acc = ViolationAccumulator(dt, epsilon)
    per_window = []
    horizon = 0
    for rec in iter_records(pred_path):
        t = int(rec["t"])
        if t not in pos:
            raise IndexMismatch(f"record t={t} has no row in {truth_path}")
        clean = values[pos[t]]
        den = np.array([np.nan if v is None else v for v in rec["denoised_current"]])
        den_acc.add(clean, np.asarray(rec.get("measurement", den)), den)
        fc = np.array([[np.nan if v is None else v for v in row] for row in rec["forecasts"]])
        horizon = max(horizon, len(fc))
        rows = [pos.get(t + j) for j in range(1, len(fc) + 1)]
        avail = [k for k, r in enumerate(rows) if r is not None]
        if not avail:
            continue
        pred = np.nan_to_num(fc[avail], nan=np.inf)
        truth = values[[rows[k] for k in avail]]
        run_acc.add(pred, truth)
        per_window.append(violation_duration(pred, truth, dt, epsilon))
    if den_acc.n == 0:
        raise IndexMismatch(f"{pred_path} holds no step records")
    J = np.array([w.J_t for w in per_window]) if per_window else np.zeros(0)
    pct = np.array([w.pct_violating for w in per_window]) if per_window else np.zeros(0)
    report = {
        "denoise": den_acc.report().to_dict(),
        "violation_run": run_acc.report().to_dict(),
        "violation_per_window": {
            "scope": "window",
            "windows": len(per_window),
            "horizon_seconds": horizon * dt,
            "mean_J_t": float(J.mean()) if J.size else 0.0,
            "max_J_t": float(J.max()) if J.size else 0.0,
            "mean_pct_violating": float(pct.mean()) if pct.size else 0.0,
        },
        "epsilon": epsilon,
        "dt": dt,
    }
    return _json_safe(report)


def _print_summary(report: dict, stream=sys.stdout) -> None:
    d = report["denoise"]
    v = report.get("violation_run")
    print(f"SNR in {d['snr_in_db']} dB -> out {d['snr_out_db']} dB (gain {d['snr_gain_db']} dB)", file=stream)
    print(f"noise reduction {d['noise_reduction_pct']}%  RMSE {d['rmse']}", file=stream)
    if d.get("zero_residual"):
        print("denoised output equals ground truth exactly", file=stream)
    if v:
        print(f"violation (run): J_t={v['J_t']:.4g} s of {v['horizon_seconds']:.4g} s ({v['pct_violating']:.3g}% violating, eps={v['epsilon']})", file=stream)


# --- sweep ------------------------------------------------------------------------


def sweep(args) -> dict:
    root = Path(args.output)
    root.mkdir(parents=True, exist_ok=True)

    def one(seed: int) -> dict:
        d = root / f"seed{seed}"
        sim_args = argparse.Namespace(**{**vars(args), "seed": seed, "output": str(d)})
        simulate(sim_args)
        run_args = argparse.Namespace(**{**vars(args), "seed": seed, "input": str(d / "noisy.csv"), "truth": str(d / "clean.csv"), "output": str(d / "records.jsonl")})
        run(run_args)
        rep = score(str(d / "records.jsonl"), str(d / "clean.csv"), args.epsilon, args.dt)
        (d / "score.json").write_text(json.dumps(rep, indent=2) + "\n", encoding="utf-8")
        return {"seed": seed, **rep}

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(one, args.seeds))
    summary = {"generator": args.generator, "seeds": args.seeds, "scenarios": results}
    (root / "sweep.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary


# --- entry point ------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
    except InvalidConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "simulate":
            m = simulate(args)
            print(f"wrote {m['rows']} rows to {args.output}")
        elif args.command == "run":
            summary = run(args)
            if summary is not None:
                _print_summary(_json_safe(summary))
        elif args.command == "score":
            rep = score(args.pred, args.truth, args.epsilon, args.dt)
            if args.output:
                Path(args.output).parent.mkdir(parents=True, exist_ok=True)
                Path(args.output).write_text(json.dumps(rep, indent=2) + "\n", encoding="utf-8")
            _print_summary(rep)
        elif args.command == "sweep":
            s = sweep(args)
            for sc in s["scenarios"]:
                print(f"seed {sc['seed']}: gain {sc['denoise']['snr_gain_db']} dB, reduction {sc['denoise']['noise_reduction_pct']}%")
    except (HankelDMDError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
