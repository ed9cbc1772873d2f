"""Command-line front end.

    fadingbc erasure-region --input pair.json [--output region.csv]
    fadingbc gaussian-outer --input pair.json [--omega-min ... --omega-points ...]
    fadingbc bes-inner      --input pair.json [--style threshold | --assignment a.json] [--stripping on|off]
    fadingbc gap            [--gamma 5.65] [--input pair.json]
    fadingbc simulate       --scenario erasure|detector|link ...

Pair files hold {"N1": pmf, "N2": pmf} for erasure channels and
{"S1": dist, "S2": dist} for fading channels.  Output goes to --output
(written atomically) or stdout; the format follows the extension (.json or
.jsonl gives JSON, anything else CSV).  Exit status: 0 ok, 2 bad input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import bes, erasure, gap, gaussian, sim
from .core import QuadratureConfig
from .errors import ContractError, DomainError, NumericError

log = logging.getLogger("fadingbc")


class InputError(Exception):
    """Bad user input; reported with exit status 2."""


def _load_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _field(data, key: str, path: str):
    if not isinstance(data, dict) or key not in data:
        raise InputError(f"{path}: missing field {key!r}")
    return data[key]


def _parse(builder, data, path: str, key: str):
    try:
        return builder(data)
    except DomainError as exc:
        raise InputError(f"{path}: field {key!r}: {exc}") from None


def _erasure_pair(path: str):
    data = _load_json(path)
    return tuple(_parse(erasure.ErasurePmf.from_dict, _field(data, k, path), path, k) for k in ("N1", "N2"))


def _fading_pair(path: str):
    data = _load_json(path)
    return tuple(_parse(gaussian.FadingDist.from_dict, _field(data, k, path), path, k) for k in ("S1", "S2"))


def _assignments(path: str) -> list[bes.LevelAssignment]:
    data = _load_json(path)
    items = data if isinstance(data, list) else [data]
    return [_parse(bes.LevelAssignment.from_dict, a, path, f"assignment[{i}]") for i, a in enumerate(items)]


def _write(args, text: str) -> None:
    if not args.output:
        sys.stdout.write(text)
        return
    target = os.path.abspath(args.output)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".fadingbc-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log.info("wrote %s", target)


def _wants_json(args) -> bool:
    return bool(args.output) and args.output.endswith((".json", ".jsonl"))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _num(v):
    if isinstance(v, (float, np.floating)):
        return "inf" if math.isinf(v) else repr(float(v))
    return v


def _scale(args) -> float:
    return 0.5 if args.real_channel else 1.0


def _weights(args) -> np.ndarray:
    if not 0 < args.omega_min < args.omega_max or args.omega_points < 2:
        raise InputError("need 0 < --omega-min < --omega-max and --omega-points >= 2")
    return np.geomspace(args.omega_min, args.omega_max, args.omega_points)


def _quad(args) -> QuadratureConfig:
    try:
        return QuadratureConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol)
    except DomainError as exc:
        raise InputError(str(exc)) from None


# commands


def cmd_erasure_region(args) -> None:
    n1, n2 = _erasure_pair(args.input)
    region = erasure.capacity_region(n1, n2).scaled(_scale(args))
    _write(args, region.to_json() + "\n" if _wants_json(args) else region.to_csv())


def cmd_gaussian_outer(args) -> None:
    s1, s2 = _fading_pair(args.input)
    pts = gaussian.outer_sweep(s1, s2, _weights(args), _quad(args))
    k = _scale(args)
    if _wants_json(args):
        region = gaussian.RateRegionBoundary.from_points(p.as_tuple() for p in pts).scaled(k)
        _write(args, region.to_json() + "\n")
        return
    rows = [(p.omega, k * p.R1, k * p.R2, "outer") for p in pts]
    _write(args, _csv(["omega", "R1", "R2", "kind"], rows))


def cmd_bes_inner(args) -> None:
    s1, s2 = _fading_pair(args.input)
    if args.assignment:
        family = _assignments(args.assignment)
    else:
        try:
            family = bes.example_assignments(s1, s2, args.style, args.max_level)
        except DomainError as exc:
            raise InputError(str(exc)) from None
    stripping = args.stripping == "on"
    kind = "inner-rs" if stripping else "inner-nors"
    k = _scale(args)
    rates = [bes.achievable_rates(s1, s2, a, stripping) for a in family]
    if _wants_json(args):
        region = gaussian.RateRegionBoundary.from_points(rates).scaled(k)
        _write(args, region.to_json() + "\n")
        return
    rows = [(float(i), k * r1, k * r2, kind) for i, (r1, r2) in enumerate(rates)]
    _write(args, _csv(["omega", "R1", "R2", "kind"], rows))


def cmd_gap(args) -> None:
    g_star, d_star = gap.minimize_gap(args.gamma_min, args.gamma_max)
    out = {"gamma_star": g_star, "delta_star": d_star}
    gamma = args.gamma if args.gamma is not None else g_star
    out["gamma"] = gamma
    out["delta"] = gap.universal_gap(gamma)
    if args.input:
        s1, s2 = _fading_pair(args.input)
        grid = gap.QuantizationGrid.for_pair(gamma, s1, s2)
        out["report"] = gap.empirical_gap(s1, s2, _weights(args), grid).to_dict()
    _write(args, json.dumps(out, indent=2) + "\n")


def cmd_simulate(args) -> None:
    reports: list[sim.SimReport]
    if args.scenario == "erasure":
        if not args.input:
            raise InputError("--input is required for the erasure scenario")
        n1, n2 = _erasure_pair(args.input)
        part = erasure.partition_levels(n1, n2, args.omega)
        reports = list(sim.simulate_erasure_scheme(n1, n2, part, args.trials, args.seed, args.threads))
    elif args.scenario == "detector":
        s = args.a * 4.0**args.level / 3.0
        try:
            depth = math.inf if args.depth == "inf" else int(args.depth)
        except ValueError:
            raise InputError(f"--depth must be an integer or 'inf', got {args.depth!r}") from None
        reports = [sim.simulate_bes_detector(s, args.level, depth, args.trials, args.seed, args.threads)]
    else:
        if not args.input or not args.assignment:
            raise InputError("--input and --assignment are required for the link scenario")
        s1, s2 = _fading_pair(args.input)
        assign = _assignments(args.assignment)[0]
        S = s1 if args.user == 1 else s2
        per = sim.simulate_bes_link(S, assign, args.user, args.stripping == "on", args.trials, args.seed, args.threads)
        reports = [per[n] for n in sorted(per)]
    _write(args, "".join(r.to_json() + "\n" for r in reports))


# parser


def _add_common(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
    p.add_argument("--input", required=needs_input, help="JSON file describing the channel pair")
    p.add_argument("--output", help="output path (.json/.jsonl for JSON, otherwise CSV); default stdout")
    p.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo runs")
    p.add_argument("--real-channel", action="store_true", help="report rates per real dimension (halved)")


def _add_weights(p: argparse.ArgumentParser, points: int = 256) -> None:
    p.add_argument("--omega-min", type=float, default=1e-4)
    p.add_argument("--omega-max", type=float, default=1e4)
    p.add_argument("--omega-points", type=int, default=points)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fadingbc", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("erasure-region", help="exact capacity region of a layered erasure BC")
    _add_common(p)
    p.set_defaults(func=cmd_erasure_region)

    p = sub.add_parser("gaussian-outer", help="state-partition outer bound of a fading Gaussian BC")
    _add_common(p)
    _add_weights(p)
    p.add_argument("--abs-tol", type=float, default=1e-9)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_gaussian_outer)

    p = sub.add_parser("bes-inner", help="BES achievable rates over a family of level assignments")
    _add_common(p)
    p.add_argument("--assignment", help="JSON file with one assignment or a list of them")
    p.add_argument("--style", choices=bes.ASSIGNMENT_STYLES, default="threshold")
    p.add_argument("--max-level", type=int)
    p.add_argument("--stripping", choices=("on", "off"), default="on")
    p.set_defaults(func=cmd_bes_inner)

    p = sub.add_parser("gap", help="universal constant gap and, with --input, the measured gap")
    _add_common(p, needs_input=False)
    _add_weights(p, points=64)
    p.add_argument("--gamma", type=float, help="quantization constant (default: the minimizer)")
    p.add_argument("--gamma-min", type=float, default=0.5)
    p.add_argument("--gamma-max", type=float, default=50.0)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("simulate", help="seeded Monte Carlo checks")
    _add_common(p, needs_input=False)
    p.add_argument("--scenario", choices=("erasure", "detector", "link"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--omega", type=float, default=1.0, help="erasure: weight that picks the partition")
    p.add_argument("--a", type=float, default=1.0, help="detector: per-layer SNR")
    p.add_argument("--level", type=int, default=3, help="detector: layer index")
    p.add_argument("--depth", default="0", help="detector: interference depth (integer or inf)")
    p.add_argument("--assignment", help="link: level assignment JSON")
    p.add_argument("--user", type=int, choices=(1, 2), default=1)
    p.add_argument("--stripping", choices=("on", "off"), default="on")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("FBC_LOG", "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (InputError, DomainError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
