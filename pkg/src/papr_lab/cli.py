"""Experiment runner: reduce | ccdf | bound | sweep, emitting CSV.

Output is a pure function of (parameters, seed): rows are ordered by block
index, floats use fixed formatting, and progress goes to stderr only.
Parameter precedence: command-line flags > config file > defaults.
"""
from __future__ import annotations

import argparse
import io
import sys

import numpy as np

from . import analysis, kernels
from .constellation import CONSTELLATION_NAMES, build_constellation
from .errors import CapacityError
from .experiments import RunSpec, configure_logging, log, run_reduction
from .selector import rate_loss

DEFAULTS = {
    "n": 64,
    "mod": "qam16",
    "oversample": 4,
    "shots": 100,
    "start_index": 1,
    "blocks": 1,
    "level": None,  # None = "not requested": falls back to 1e-3 when resolvable
    "seed": None,
    "out": None,
    "threads": 1,
    "paired_shots": True,
    "param": None,
    "values": None,
}

DEFAULT_LEVEL = 1e-3

_EXIT_CONFIG = 2
_EXIT_CAPACITY = 3


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _read_config_file(path: str) -> dict:
    """Flat key-value file mirroring the flags: ``key = value`` per line."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


_CASTS = {
    "n": int, "oversample": int, "shots": int, "start_index": int,
    "blocks": int, "threads": int, "seed": int,
    "level": float, "mod": str, "out": str, "param": str, "values": str,
    "paired_shots": _parse_bool,
}


def _merge(args: argparse.Namespace) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            merged[key] = _CASTS[key](raw)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged["seed"] is None:
        raise ValueError("a seed is required (--seed or config file)")
    if merged["mod"] not in CONSTELLATION_NAMES:
        raise ValueError(f"unknown modulation {merged['mod']!r}")
    if merged["level"] is not None and not 0.0 < merged["level"] < 1.0:
        raise ValueError(f"level must be in (0, 1), got {merged['level']}")
    if merged["threads"] < 1:
        raise ValueError("threads must be >= 1")
    if merged["blocks"] < 1:
        raise ValueError("blocks must be >= 1")
    return merged


def _spec(p: dict, **overrides) -> RunSpec:
    fields = dict(
        n=p["n"], modulation=p["mod"], oversample=p["oversample"],
        shots=p["shots"], start_index=p["start_index"], num_blocks=p["blocks"],
        seed=p["seed"], paired=p["paired_shots"], threads=p["threads"],
    )
    fields.update(overrides)
    return RunSpec(**fields)


def _resolve_level(p: dict, num_samples: int):
    """Explicit level: enforced. Omitted: default when resolvable, else None."""
    if p["level"] is not None:
        if num_samples * p["level"] < 10.0:
            raise CapacityError(
                f"{num_samples} blocks cannot resolve the {p['level']:g} tail"
            )
        return p["level"]
    if num_samples * DEFAULT_LEVEL >= 10.0:
        return DEFAULT_LEVEL
    return None


def cmd_reduce(p: dict, out: io.TextIOBase) -> None:
    spec = _spec(p)
    level = _resolve_level(p, spec.num_blocks)  # fail early, before the run
    run = run_reduction(spec)
    out.write("block_id,papr0_db,papr1_db\n")
    for i in range(spec.num_blocks):
        out.write(f"{i},{_fmt(run.papr0_db[i])},{_fmt(run.papr1_db[i])}\n")
    if level is not None:
        eff0 = analysis.effective_papr(analysis.empirical_ccdf(run.papr0_db), level)
        eff1 = analysis.effective_papr(analysis.empirical_ccdf(run.papr1_db), level)
        tag = f"{level:g}"
    else:
        eff0 = float(np.max(run.papr0_db))
        eff1 = float(np.max(run.papr1_db))
        tag = "max"
    out.write(f"effective_papr_db,{_fmt(eff0)},{_fmt(eff1)}\n")
    out.write(f"delta_db,{_fmt(eff0 - eff1)},{tag}\n")
    log.info("reduction at level %s: %.3f dB", tag, eff0 - eff1)


def cmd_ccdf(p: dict, out: io.TextIOBase) -> None:
    level = p["level"] if p["level"] is not None else DEFAULT_LEVEL
    partial_index = p["start_index"]
    spec = _spec(p, start_index=max(1, partial_index), partial_index=partial_index)
    run = run_reduction(spec)
    out.write("curve,gamma_db,ccdf\n")

    def emit(name, dist):
        values, tail = dist.curve_points()
        for v, q in zip(values, tail):
            out.write(f"{name},{_fmt(v)},{q:.8g}\n")

    emit("papr0", analysis.empirical_ccdf(run.papr0_db))
    emit("papr1", analysis.empirical_ccdf(run.papr1_db))
    partial_db = 20.0 * np.log10(run.partial_cf)
    emit("zm", analysis.empirical_ccdf(partial_db))

    # tail-bound curve anchored at the sample mean of the partial estimates
    constellation = build_constellation(p["mod"])
    mean_cf = float(np.mean(run.partial_cf))
    top = analysis.mcdiarmid_deviation(min(level / 10.0, 1e-6), constellation)
    gammas = np.linspace(mean_cf, mean_cf + top, 257)
    bound = analysis.mcdiarmid_ccdf_curve(mean_cf, constellation, gammas)
    for g, q in zip(gammas, bound):
        out.write(f"mcdiarmid,{_fmt(20.0 * np.log10(g))},{q:.8g}\n")


def cmd_bound(p: dict, out: io.TextIOBase) -> None:
    level = p["level"] if p["level"] is not None else DEFAULT_LEVEL
    config = _spec(p).config()
    rng = np.random.default_rng(p["seed"])
    mean_cf = analysis.estimate_mean_cf(config, p["blocks"], rng)
    deviation = analysis.mcdiarmid_deviation(level, config.constellation)
    bound = analysis.bound_papr_db(mean_cf, deviation)
    out.write("mu,alpha,level,bound_db\n")
    out.write(f"{_fmt(mean_cf)},{_fmt(deviation)},{level:g},{_fmt(bound)}\n")
    log.info("mean CF %.4f, deviation %.4f, bound %.2f dB", mean_cf, deviation, bound)


_SWEEPABLE = {"q": "q", "shots": "q", "m": "m", "start-index": "m",
              "start_index": "m", "n": "n"}
_SWEEP_FIELD = {"q": "shots", "m": "start_index", "n": "n"}


def cmd_sweep(p: dict, out: io.TextIOBase) -> None:
    if p["param"] is None or p["values"] is None:
        raise ValueError("sweep needs --param {q|m|n} and --values v1,v2,...")
    name = _SWEEPABLE.get(p["param"].lower())
    if name is None:
        raise ValueError(f"cannot sweep {p['param']!r}; choose q, m or n")
    values = [int(v) for v in str(p["values"]).split(",") if v.strip()]
    if not values:
        raise ValueError("empty sweep value list")
    level = p["level"] if p["level"] is not None else DEFAULT_LEVEL
    out.write("param,value,eff_papr_db,stderr_db\n")
    for value in values:
        spec = _spec(p, **{_SWEEP_FIELD[name]: value})
        if spec.num_blocks * level < 10.0:
            raise CapacityError(f"{spec.num_blocks} blocks cannot resolve the {level:g} tail")
        run = run_reduction(spec)
        eff1, se1 = analysis.effective_papr_with_stderr(
            analysis.empirical_ccdf(run.papr1_db), level)
        eff0, se0 = analysis.effective_papr_with_stderr(
            analysis.empirical_ccdf(run.papr0_db), level)
        out.write(f"{name},{value},{_fmt(eff1)},{_fmt(se1)}\n")
        out.write(f"{name}:baseline,{value},{_fmt(eff0)},{_fmt(se0)}\n")
        log.info("%s=%d: reduction %.3f dB", name, value, eff0 - eff1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="papr-lab",
        description="Sign-selection PAPR reduction experiments (CSV output).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, fn in (("reduce", cmd_reduce), ("ccdf", cmd_ccdf),
                        ("bound", cmd_bound), ("sweep", cmd_sweep)):
        sp = sub.add_parser(command)
        sp.set_defaults(func=fn)
        sp.add_argument("--config", help="flat key=value file mirroring the flags")
        sp.add_argument("--n", type=int, help="subcarrier count")
        sp.add_argument("--mod", choices=CONSTELLATION_NAMES, help="constellation")
        sp.add_argument("--oversample", type=int, help="oversampling factor L")
        sp.add_argument("--shots", type=int, help="completions per estimate (q)")
        sp.add_argument("--start-index", dest="start_index", type=int,
                        help="first selected sign position (m)")
        sp.add_argument("--blocks", type=int, help="number of OFDM blocks / samples")
        sp.add_argument("--level", type=float, help="CCDF level for effective PAPR")
        sp.add_argument("--seed", type=int, help="root seed (required)")
        sp.add_argument("--out", help="output CSV path (default: stdout)")
        sp.add_argument("--threads", type=int, help="worker threads across blocks")
        sp.add_argument("--paired-shots", dest="paired_shots", type=_parse_bool,
                        help="share completions between the +/- candidates")
        sp.add_argument("--quiet", action="store_true", help="suppress progress output")
        if command == "sweep":
            sp.add_argument("--param", help="parameter to sweep: q, m or n")
            sp.add_argument("--values", help="comma-separated sweep values")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(verbose=not getattr(args, "quiet", False))
    try:
        params = _merge(args)
        buffer = io.StringIO()
        args.func(params, buffer)
    except CapacityError as exc:
        print(f"papr-lab: {exc}", file=sys.stderr)
        return _EXIT_CAPACITY
    except (ValueError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"papr-lab: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    payload = buffer.getvalue()
    if params["out"]:
        with open(params["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    log.info("backend: %s", kernels.active_backend())
    return 0


if __name__ == "__main__":
    sys.exit(main())
