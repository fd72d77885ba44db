"""Command-line interface.

Exit codes: 0 all requested checks pass, 1 a verification failed,
2 usage or configuration error.  Verification commands emit their report
on both exit 0 and exit 1.  The environment variable
COAMOEBA_ATLAS_THREADS caps the worker threads used by ``verify-all``
(results are independent of the value; only wall time changes).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .plane import PlaneConfig, validate_config
from .projective import RP1Dir
from .fibers import RolledValue, classify_value, fiber_arcs, fiber_model
from .critical import point_d_direct, d_circles_check, _affine_value_raw
from . import checks, svg, topology

SCHEMA = checks.REPORT_SCHEMA


class UsageError(Exception):
    pass


def _load_config(args) -> PlaneConfig:
    cfg = PlaneConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = PlaneConfig.from_json(fh.read())
        except OSError as e:
            raise UsageError(f"cannot read config: {e}")
        except (KeyError, ValueError, TypeError) as e:
            raise UsageError(f"malformed config {args.config!r}: {e}")
    if getattr(args, "seed", None) is not None:
        cfg = PlaneConfig(a=cfg.a, k=cfg.k, seed=args.seed, tol=cfg.tol)
    return cfg


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    if getattr(args, "json", False) or not getattr(args, "out", None):
        sys.stdout.write(text)


def _rolled_from_angles(angles) -> RolledValue:
    dirs = [RP1Dir.from_pair(np.cos(t), np.sin(t)) for t in angles]
    return RolledValue.from_dirs(*dirs)


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    cfg = _load_config(args)
    rep = validate_config(cfg.a, cfg.k, scan_grid=args.scan_grid)
    payload = {
        "schema": SCHEMA,
        "command": "validate",
        "a": [cfg.a.real, cfg.a.imag],
        "k": [cfg.k.real, cfg.k.imag],
        "checks": {name: bool(ok) for name, ok in rep.checks.items()},
        "passed": rep.ok,
    }
    _emit(payload, args)
    return 0 if rep.ok else 1


def cmd_verify_all(args) -> int:
    cfg = _load_config(args)
    vrep = validate_config(cfg.a, cfg.k)
    if not vrep.ok:
        payload = {
            "schema": SCHEMA,
            "command": "verify-all",
            "level": args.level,
            "config": json.loads(cfg.to_json()),
            "validation": {n: bool(ok) for n, ok in vrep.checks.items()},
            "checks": [],
            "passed": False,
        }
        _emit(payload, args)
        sys.stderr.write("config failed genericity validation; suite not run\n")
        return 1
    workers = int(os.environ.get("COAMOEBA_ATLAS_THREADS", "1") or "1")
    results = checks.run_all(cfg, args.level, max_workers=max(1, workers))
    for r in results:
        sys.stderr.write(r.line() + "\n")
    payload = {
        "schema": SCHEMA,
        "command": "verify-all",
        "level": args.level,
        "config": json.loads(cfg.to_json()),
        "checks": [r.to_dict(include_timings=args.timings) for r in results],
        "passed": all(r.passed for r in results),
    }
    _emit(payload, args)
    return 0 if payload["passed"] else 1


def _classify_payload(c: RolledValue, cfg: PlaneConfig) -> dict:
    cls = classify_value(c, cfg)
    payload = {
        "classification": cls.kind,
        "rank": cls.rank,
        "rolled_angles": [float(t) for t in c.angles()],
    }
    if cls.kind == "regular" and cls.preimage is not None:
        payload["preimage"] = {
            "x": [cls.preimage.x.real, cls.preimage.x.imag],
            "y": [cls.preimage.y.real, cls.preimage.y.imag],
        }
    if cls.kind == "critical" and cls.fiber is not None:
        arcs = fiber_arcs(cls.fiber, cfg)
        payload["arcs"] = len(arcs)
        payload["cyclic_order"] = list(topology.cyclic_order(cls.fiber, cfg))
    return payload


def cmd_invert(args) -> int:
    cfg = _load_config(args)
    c = _rolled_from_angles(args.angles)
    payload = {"schema": SCHEMA, "command": "invert"}
    payload.update(_classify_payload(c, cfg))
    _emit(payload, args)
    return 0


def cmd_classify(args) -> int:
    cfg = _load_config(args)
    c = _rolled_from_angles(args.angles)
    payload = {"schema": SCHEMA, "command": "classify"}
    payload.update(_classify_payload(c, cfg))
    _emit(payload, args)
    return 0


def cmd_from_p(args) -> int:
    cfg = _load_config(args)
    p = complex(args.p[0], args.p[1])
    try:
        c = _affine_value_raw(p, cfg)
    except Exception as e:
        raise UsageError(f"no critical value attached to p = {p}: {e}")
    model = fiber_model(c, cfg)
    marked = model.marked_points()
    payload = {
        "schema": SCHEMA,
        "command": "from-p",
        "p": [p.real, p.imag],
        "rolled_angles": [float(t) for t in c.angles()],
        "marked_angles": {n: float(d.theta) for n, d in sorted(marked.items())},
        "cyclic_order": list(topology.cyclic_order(model, cfg)),
        "arcs": len(fiber_arcs(model, cfg)),
    }
    _emit(payload, args)
    return 0


def cmd_pencil(args) -> int:
    cfg = _load_config(args)
    res = checks.check_pencil(cfg)
    dd = d_circles_check(cfg)
    d = point_d_direct(cfg)
    payload = {
        "schema": SCHEMA,
        "command": "pencil",
        "check": res.to_dict(),
        "d": [d.real, d.imag],
        "circle_residuals_at_d": [float(r) for r in dd["residuals"]],
        "passed": res.passed,
    }
    _emit(payload, args)
    return 0 if res.passed else 1


def cmd_coincidence(args) -> int:
    cfg = _load_config(args)
    res = checks.check_sections_coincidences(cfg, level=args.level)
    loci = topology.trace_coincidence_loci(cfg)
    payload = {
        "schema": SCHEMA,
        "command": "coincidence",
        "check": res.to_dict(),
        "loci": [
            {
                "pair": list(pair),
                "kind": loci[pair].kind,
                "closed": loci[pair].closed,
                "components": loci[pair].component_count,
            }
            for pair in sorted(loci)
        ],
        "passed": res.passed,
    }
    _emit(payload, args)
    return 0 if res.passed else 1


def cmd_monodromy(args) -> int:
    cfg = _load_config(args)
    rep = topology.monodromy_report(cfg)
    payload = {
        "schema": SCHEMA,
        "command": "monodromy",
        "base_point": [rep.base_point.real, rep.base_point.imag],
        "loops": [
            {
                "name": name,
                "permutation": list(perm),
                "orientation_reversing": bool(rev),
            }
            for name, perm, rev in zip(
                rep.loop_names, rep.permutations, rep.orientation_reversing
            )
        ],
        "transitive": rep.transitive,
        "passed": rep.transitive,
    }
    _emit(payload, args)
    return 0 if rep.transitive else 1


def cmd_covering(args) -> int:
    cfg = _load_config(args)
    n = checks.LEVEL_SAMPLES[args.level]
    rep = topology.covering_report(cfg, n_samples=n)
    ok = (
        rep.degree == 5
        and rep.connected
        and rep.chi_cover == -15
        and rep.boundary_circles == 10
        and rep.arrangement.euler == 1
    )
    payload = {
        "schema": SCHEMA,
        "command": "covering",
        "degree": rep.degree,
        "connected": rep.connected,
        "chi_base": rep.chi_base,
        "chi_cover": rep.chi_cover,
        "boundary_circles": rep.boundary_circles,
        "arrangement": {
            "V": rep.arrangement.V,
            "E": rep.arrangement.E,
            "F": rep.arrangement.F,
            "euler": rep.arrangement.euler,
            "sphere_check": rep.arrangement.sphere_check,
            "antipodal_free": rep.arrangement.antipodal_free,
        },
        "arc_counts": {
            stratum: {str(kk): vv for kk, vv in cnt.items()}
            for stratum, cnt in rep.arc_counts.items()
        },
        "passed": ok,
    }
    _emit(payload, args)
    return 0 if ok else 1


def cmd_render(args) -> int:
    cfg = _load_config(args)
    data = svg.render_figure(cfg, args.kind)
    out = args.out or f"{args.kind}.svg"
    with open(out, "wb") as fh:
        fh.write(data)
    sys.stderr.write(f"wrote {out} ({len(data)} bytes)\n")
    return 0


# ---------------------------------------------------------------- parser


def _add_common(p, seed=True, out=True, as_json=True, config=True):
    if config:
        p.add_argument("--config", metavar="PATH",
                       help="JSON config file (a, k, seed, tolerances)")
    if seed:
        p.add_argument("--seed", type=int, default=None,
                       help="override the sampling seed")
    if out:
        p.add_argument("--out", metavar="PATH",
                       help="write the JSON report (or figure) to PATH")
    if as_json:
        p.add_argument("--json", action="store_true",
                       help="print the JSON report to stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coamoeba-atlas",
        description=(
            "Compute and verify the critical locus and critical values of "
            "the log / argument maps of a generic affine plane in C^4."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check genericity of (a, k)")
    _add_common(p)
    p.add_argument("--scan-grid", type=int, default=0,
                   help="also run a coarse triple-coincidence scan")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("verify-all", help="run the full verification suite")
    _add_common(p)
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--timings", action="store_true",
                   help="include runtimes in the report (breaks byte-identity)")
    p.set_defaults(fn=cmd_verify_all)

    p = sub.add_parser("invert",
                       help="classify four angles (mod pi) and invert if regular")
    _add_common(p)
    p.add_argument("angles", type=float, nargs=4, metavar="THETA")
    p.set_defaults(fn=cmd_invert)

    p = sub.add_parser("classify", help="classify four angles (mod pi)")
    _add_common(p)
    p.add_argument("angles", type=float, nargs=4, metavar="THETA")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("from-p",
                       help="critical value and fiber data at a concurrency point")
    _add_common(p)
    p.add_argument("p", type=float, nargs=2, metavar=("RE", "IM"))
    p.set_defaults(fn=cmd_from_p)

    p = sub.add_parser("pencil", help="verify the fiber-conic pencil")
    _add_common(p)
    p.set_defaults(fn=cmd_pencil)

    p = sub.add_parser("coincidence", help="trace and verify coincidence loci")
    _add_common(p)
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(fn=cmd_coincidence)

    p = sub.add_parser("monodromy", help="covering monodromy over the generators")
    _add_common(p)
    p.set_defaults(fn=cmd_monodromy)

    p = sub.add_parser("covering", help="aggregate covering-space verification")
    _add_common(p)
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(fn=cmd_covering)

    p = sub.add_parser("render", help="render a deterministic SVG figure")
    _add_common(p, as_json=False)
    p.add_argument("kind", choices=svg.FIGURE_KINDS)
    p.set_defaults(fn=cmd_render)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
