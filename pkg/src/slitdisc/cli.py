"""Command-line front end: capacity, gamma, classify, phase-diagram, qc,
kernel, counterexample.

Records are {config, results, provenance} JSON (CSV for sweeps).  Identical
config + seed give byte-identical output apart from the provenance timestamp.
Rational inputs like "1/8" stay exact through every threshold comparison;
decimal inputs travel as floats behind a guard band.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import enum
import io
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .bergman import BasisSpec, QuadratureConfig, metric_path_length, _KernelEngine
from .capacity import (
    arc_log_capacity,
    disc_log_capacity,
    equilibrium_energy,
    fekete_log_capacity,
    log_capacity,
    segment_log_capacity,
)
from .geometry import (
    ArcObstacle,
    CompactSet,
    ParamRT,
    annulus,
    arc,
    build_domain,
    circle,
    make_arc,
    punctured_disc,
    unit_disc,
)
from .numerics import parse_number
from .qcmap import QCParams, beltrami, counterexample_chain, qc_constant, transport_params
from .wiener import GammaQuadrature, divergence_ratio, gamma_at_origin, gamma_numeric, threshold_report


# ---------------------------------------------------------------------------
# serialization


def to_jsonable(obj):
    """Lossless JSON projection: Fractions and non-finite floats to strings,
    complex to {re, im}, dataclasses/enums unwrapped."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return {"im": to_jsonable(obj.imag), "re": to_jsonable(obj.real)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):  # NamedTuple, which is also a tuple: check first
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return repr(obj)


def _provenance(seed) -> dict:
    return {
        "seed": seed,
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "tool": "slitdisc",
        "version": __version__,
    }


def _emit(record: dict, args, text: str | None = None) -> None:
    """Write JSON (or preformatted CSV text) to --out or stdout."""
    payload = text if text is not None else json.dumps(to_jsonable(record), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _parse_complex(text: str) -> complex:
    s = text.strip()
    if "," in s:
        re_s, im_s = s.split(",", 1)
        return complex(float(re_s), float(im_s))
    return complex(float(s), 0.0)


# ---------------------------------------------------------------------------
# subcommands


def cmd_capacity(args) -> dict:
    results: dict = {}
    if args.shape == "circle":
        shape = circle(args.radius)
        results["closed_form_log"] = log_capacity(shape).log_value
    elif args.shape == "arc":
        shape = arc(args.radius, 0.0, args.half_width)
        results["closed_form_log"] = arc_log_capacity(args.radius, args.half_width).log_value
    elif args.shape == "segment":
        from .geometry import SegmentObstacle

        shape = SegmentObstacle(0j, complex(args.length, 0.0))
        results["closed_form_log"] = segment_log_capacity(args.length).log_value
    elif args.shape == "disc":
        from .geometry import DiscObstacle

        shape = DiscObstacle(0j, args.radius)
        results["closed_form_log"] = disc_log_capacity(args.radius).log_value
    else:  # family-arc
        params = ParamRT(parse_number(args.r), parse_number(args.t))
        shape = make_arc(params, args.k)
        results["closed_form_log"] = log_capacity(shape).log_value
        results["family"] = {"k": args.k, "r": params.r, "t": params.t}
    if args.fekete_n:
        cs = shape if isinstance(shape, CompactSet) else CompactSet((shape,))
        results["fekete_n"] = args.fekete_n
        results["fekete_log"] = fekete_log_capacity(cs, args.fekete_n, seed=args.seed).log_value
    if args.equilibrium_m:
        cs = shape if isinstance(shape, CompactSet) else CompactSet((shape,))
        energy, measure = equilibrium_energy(cs, args.equilibrium_m, seed=args.seed)
        results["equilibrium_m"] = args.equilibrium_m
        results["equilibrium_energy"] = energy.value
        results["equilibrium_tolerance"] = energy.tolerance
    return results


def cmd_gamma(args) -> dict:
    params = ParamRT(parse_number(args.r), parse_number(args.t))
    z = _parse_complex(args.z)
    results: dict = {"ratio": divergence_ratio(params, args.n)}
    if z == 0j and not args.numeric:
        report = gamma_at_origin(params, args.n)
    else:
        quad = GammaQuadrature(delta_min=args.delta_min, divergence_threshold=args.threshold)
        report = gamma_numeric(build_domain(params, args.kmax), z, args.n, quad)
    results["report"] = report
    return results


def cmd_classify(args) -> dict:
    params = ParamRT(parse_number(args.r), parse_number(args.t))
    return {"report": threshold_report(params)}


def cmd_phase_diagram(args) -> tuple[dict, str | None]:
    r_min, r_max = parse_number(args.r_min), parse_number(args.r_max)
    t_min, t_max = parse_number(args.t_min), parse_number(args.t_max)
    if not (0 < r_min <= r_max < 1 and 0 < t_min <= t_max < Fraction(1, 2)):
        raise ValueError("grid bounds must satisfy 0 < r < 1 and 0 < t < 1/2")
    rows = []
    for i in range(args.r_steps):
        r = r_min + (r_max - r_min) * Fraction(i, max(args.r_steps - 1, 1))
        for j in range(args.t_steps):
            t = t_min + (t_max - t_min) * Fraction(j, max(args.t_steps - 1, 1))
            rep = threshold_report(ParamRT(r, t))
            rows.append(
                {
                    "r": r,
                    "t": t,
                    "verdict": rep.classification.value,
                    "ratio_n0": rep.ratio_n0,
                    "ratio_n1": rep.ratio_n1,
                }
            )
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["r", "t", "verdict", "ratio_n0", "ratio_n1"])
        for row in rows:
            writer.writerow([_csv_cell(row[k]) for k in ("r", "t", "verdict", "ratio_n0", "ratio_n1")])
        return {"rows": rows}, buf.getvalue()
    return {"rows": rows}, None


def _csv_cell(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_qc(args) -> dict:
    alpha = QCParams(parse_number(args.alpha))
    results: dict = {"L": qc_constant(alpha)}
    z = _parse_complex(args.z)
    if z != 0j:
        results["beltrami"] = beltrami(alpha, z)
    if args.r is not None:
        params = ParamRT(parse_number(args.r), parse_number(args.t))
        image = transport_params(params, alpha)
        results["source"] = params
        results["image"] = image
        results["image_flags"] = image.flags()
    return results


def cmd_kernel(args) -> dict:
    if args.domain == "disc":
        dom = unit_disc()
    elif args.domain == "punctured":
        dom = punctured_disc()
    else:
        dom = annulus(float(parse_number(args.inner_radius)))
    basis = BasisSpec(domain=dom, max_degree=args.max_degree, min_degree=args.min_degree)
    quad = QuadratureConfig(radial_order=args.radial_order, angular_points=args.angular_points)
    engine = _KernelEngine(basis, quad)
    results: dict = {"estimate": engine.estimate(_parse_complex(args.z))}
    if args.path:
        pts = tuple(_parse_complex(p) for p in args.path)
        results["path"] = pts
        results["path_length"] = metric_path_length(basis, quad, pts, samples=args.samples)
    return results


def cmd_counterexample(args) -> dict:
    alpha = QCParams(parse_number(args.alpha))
    r = parse_number(args.r) if args.r is not None else None
    t = parse_number(args.t) if args.t is not None else None
    chain = counterexample_chain(alpha, r=r, t=t)
    return {"chain": chain, "succeeds": chain.succeeds}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slitdisc", description="slit-disc capacity, Wiener criterion, and Bergman toolkit")
    p.add_argument("--version", action="version", version=f"slitdisc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=None, help="write the record to this path instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--kmax", type=int, default=200)

    sp = sub.add_parser("capacity", help="log capacity of a described set, closed form vs oracles")
    sp.add_argument("--shape", choices=("circle", "arc", "segment", "disc", "family-arc"), required=True)
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--half-width", type=float, default=math.pi, help="arc half-angle in radians")
    sp.add_argument("--length", type=float, default=1.0)
    sp.add_argument("--r", default="1/8")
    sp.add_argument("--t", default="1/32")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--fekete-n", type=int, default=0, help="also run the Fekete oracle with n points")
    sp.add_argument("--equilibrium-m", type=int, default=0, help="also run the equilibrium-measure oracle with m cells")
    common(sp)
    sp.set_defaults(fn=cmd_capacity)

    sp = sub.add_parser("gamma", help="Wiener-type gamma^(n): analytic shells at 0, bracketing quadrature elsewhere")
    sp.add_argument("--r", required=True)
    sp.add_argument("--t", required=True)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--z", default="0", help="evaluation point, 're' or 're,im'")
    sp.add_argument("--numeric", action="store_true", help="force the quadrature path even at z = 0")
    sp.add_argument("--delta-min", type=float, default=1e-12)
    sp.add_argument("--threshold", type=float, default=1e6)
    common(sp)
    sp.set_defaults(fn=cmd_gamma)

    sp = sub.add_parser("classify", help="completeness classification by the threshold rules")
    sp.add_argument("--r", required=True)
    sp.add_argument("--t", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("phase-diagram", help="classification sweep over a rational (r, t) grid")
    sp.add_argument("--r-min", default="1/20")
    sp.add_argument("--r-max", default="9/20")
    sp.add_argument("--r-steps", type=int, default=50)
    sp.add_argument("--t-min", default="1/100")
    sp.add_argument("--t-max", default="49/100")
    sp.add_argument("--t-steps", type=int, default=50)
    common(sp)
    sp.set_defaults(fn=cmd_phase_diagram)

    sp = sub.add_parser("qc", help="quasi-conformal map data and parameter transport")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--z", default="0.25")
    sp.add_argument("--r", default=None)
    sp.add_argument("--t", default="1/32")
    common(sp)
    sp.set_defaults(fn=cmd_qc)

    sp = sub.add_parser("kernel", help="Bergman kernel/metric estimates on validation domains")
    sp.add_argument("--domain", choices=("disc", "punctured", "annulus"), default="disc")
    sp.add_argument("--inner-radius", default="1/2")
    sp.add_argument("--max-degree", type=int, default=30)
    sp.add_argument("--min-degree", type=int, default=0)
    sp.add_argument("--radial-order", type=int, default=64)
    sp.add_argument("--angular-points", type=int, default=512)
    sp.add_argument("--z", default="0")
    sp.add_argument("--path", nargs="*", default=None, help="polyline waypoints for a Bergman length")
    sp.add_argument("--samples", type=int, default=257)
    common(sp)
    sp.set_defaults(fn=cmd_kernel)

    sp = sub.add_parser("counterexample", help="complete -> quasi-conformal image not complete, full chain")
    sp.add_argument("--alpha", default="2/3")
    sp.add_argument("--r", default=None)
    sp.add_argument("--t", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_counterexample)

    return p


def _config_echo(args) -> dict:
    skip = {"fn", "out"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.fn(args)
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = None
    if isinstance(out, tuple):
        results, text = out
    else:
        results = out
    if text is not None and args.format == "csv":
        _emit({}, args, text=text)
        return 0
    record = {
        "config": _config_echo(args),
        "provenance": _provenance(args.seed),
        "results": results,
    }
    _emit(record, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
