"""Batch command-line front door.

Four subcommands, all emitting diff-able CSV + JSON artifacts:

* ``eval``      — one-point values of a finite-n or limiting kernel on a grid;
* ``verify``    — residual checks (ward, mass-one, series, eighth,
                  inequalities, positivity, polarized) against the versioned
                  thresholds table; exit 0 iff below threshold;
* ``converge``  — finite-n to limit convergence tables (or edge sections);
* ``sample``    — Monte Carlo radial profiles with deviation stats.

Exit codes: 0 pass, 1 verification fail, 2 usage error, 3 numeric
non-convergence.  Identical resolved configs produce byte-identical JSON
(no timestamps; CSV floats use 17 significant digits).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .finite_n import (
    DivisionNearZero,
    Potential,
    RescaleFrame,
    exp_section,
    rescaled_kernel,
)
from .limits import (
    LimitKernelSpec,
    NonHermitianInput,
    QuadratureConfig,
    ZeroIntensity,
    eighth_formula,
    gram_min_eig,
    hermite_identity_residual,
    inequality_suite,
    mass_one_residual,
    mass_one_series_residual,
    one_point,
    polarized_mass_one_residual,
    telescoping_sum,
    ward_point_residual,
)
from .sampler import (
    BudgetExceeded,
    SampleConfig,
    boundary_profile,
    bulk_singularity_profile,
)
from .special import (
    QuadratureNotConverged,
    SeriesNotConverged,
    hard_edge_H,
    mittag_leffler_kernel_eval,
    plasma_F,
)

THRESHOLDS_VERSION = 1

# Single source of truth for every pass/fail decision `verify` makes.
THRESHOLDS = {
    ("ward", "bulk"): 1e-8,
    ("ward", "free_boundary"): 5e-4,
    ("ward", "hard_edge"): 1e-3,
    ("ward", "mittag_leffler"): 5e-3,
    ("ward", "constant"): 1e-8,
    ("mass-one", "bulk"): 1e-6,
    ("mass-one", "free_boundary"): 1e-6,
    ("mass-one", "hard_edge"): 1e-4,
    ("mass-one", "mittag_leffler"): 1e-4,
    ("mass-one", "constant"): 1e-9,
    ("series", "*"): 1e-10,
    ("eighth", "*"): 1e-8,
    ("inequalities", "*"): 1e-10,
    ("positivity", "*"): 1e-9,
    ("polarized", "free_boundary"): 1e-6,
    ("polarized", "hard_edge"): 1e-6,
}

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_NUMERIC_ERRORS = (
    SeriesNotConverged,
    QuadratureNotConverged,
    DivisionNearZero,
    ZeroIntensity,
    NonHermitianInput,
    BudgetExceeded,
)


def threshold_for(equation: str, spec_kind: str) -> float:
    if (equation, spec_kind) in THRESHOLDS:
        return THRESHOLDS[(equation, spec_kind)]
    return THRESHOLDS[(equation, "*")]


def _show_thresholds() -> None:
    print(f"thresholds table v{THRESHOLDS_VERSION} (plasma-kernel {__version__})")
    print(f"{'equation':<14}{'spec':<18}{'sup threshold':>14}")
    for (eq, kind), tol in THRESHOLDS.items():
        print(f"{eq:<14}{kind:<18}{tol:>14g}")


# --------------------------------------------------------------------------
# argument parsing helpers
# --------------------------------------------------------------------------


def parse_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must be a:b:step, got {text!r}")
    if step <= 0 or b < a:
        raise ValueError(f"need a <= b and step > 0 in {text!r}")
    count = int(round((b - a) / step)) + 1
    return a + step * np.arange(count)


def parse_spec(text: str) -> LimitKernelSpec:
    name, _, arg = text.partition(":")
    name = name.replace("_", "-")
    if name in ("bulk", "ginibre-bulk"):
        return LimitKernelSpec.ginibre_bulk()
    if name == "free-boundary":
        if not arg:
            return LimitKernelSpec.free_boundary()
        ends = [float(p) for p in arg.split(",")]
        if len(ends) % 2:
            raise ValueError("free-boundary endpoints must come in pairs")
        ivals = tuple((ends[i], ends[i + 1]) for i in range(0, len(ends), 2))
        return LimitKernelSpec.free_boundary(ivals)
    if name == "hard-edge":
        return LimitKernelSpec.hard_edge()
    if name in ("ml", "mittag-leffler"):
        return LimitKernelSpec.mittag_leffler(float(arg or 2.0))
    if name == "constant":
        return LimitKernelSpec.constant_profile(float(arg or 0.5))
    raise ValueError(f"unknown kernel spec {text!r}")


def parse_pot(text: str) -> Potential:
    name, _, arg = text.partition(":")
    name = name.replace("_", "-")
    if name == "ginibre":
        return Potential.ginibre()
    if name == "power":
        return Potential.power(float(arg or 2.0))
    if name == "hard-edge":
        return Potential.hard_edge()
    raise ValueError(f"unknown potential {text!r}")


def parse_quad(text: str) -> QuadratureConfig:
    try:
        r_max, nr, na = text.split(",")
        return QuadratureConfig(float(r_max), int(nr), int(na))
    except ValueError:
        raise ValueError(f"quad must be r_max,nr,na, got {text!r}")


def _parse_points(text: str, seed: int):
    if text.startswith("random:"):
        count = int(text.split(":", 1)[1])
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-2.0, 2.0, size=(count, 2))
        return [complex(x, y) for x, y in pts]
    return [complex(p) for p in text.split(",")]


# --------------------------------------------------------------------------
# artifact output
# --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _canonical(obj):
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    return obj


def _write_json(path: str, command: str, config: dict, results: dict) -> None:
    config = _canonical(config)
    payload = {
        "version": __version__,
        "thresholds_version": THRESHOLDS_VERSION,
        "command": command,
        "config": config,
        "config_hash": hashlib.sha256(
            json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest(),
        "seed": config.get("seed"),
        "results": _canonical(results),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def _out_path(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in text).strip("-")


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------


def cmd_eval(args) -> int:
    axis = parse_grid(args.grid)
    zs = axis[None, :] + 1j * axis[:, None]
    if args.limit:
        spec = parse_spec(args.limit)
        values = np.array([[one_point(spec, z) for z in row] for row in zs], dtype=complex)
        tag = _slug(args.limit)
        config = {"mode": "limit", "spec": args.limit, "grid": args.grid}
    else:
        pot = parse_pot(args.finite)
        frame = _make_frame(pot, args.n, args.frame)
        values = np.array(
            [[rescaled_kernel(pot, frame, z, z) for z in row] for row in zs]
        )
        tag = f"{_slug(args.finite)}-n{args.n}-{args.frame}"
        config = {"mode": "finite", "pot": args.finite, "n": args.n,
                  "frame": args.frame, "grid": args.grid}

    rows = [
        (float(z.real), float(z.imag), float(v.real), float(v.imag))
        for z, v in zip(zs.ravel(), values.ravel())
    ]
    csv_path = _out_path(args, f"eval_{tag}.csv")
    _write_csv(csv_path, ("re_z", "im_z", "re_val", "im_val"), rows)
    real_vals = values.real
    _write_json(_out_path(args, f"eval_{tag}.json"), "eval", config, {
        "points": int(values.size),
        "min_value": float(real_vals.min()),
        "max_value": float(real_vals.max()),
        "mean_value": float(real_vals.mean()),
        "csv": os.path.basename(csv_path),
    })
    return EXIT_PASS


def _make_frame(pot: Potential, n: int, frame_name: str) -> RescaleFrame:
    if frame_name == "bulk":
        return RescaleFrame.bulk(pot, n)
    if frame_name == "boundary":
        return RescaleFrame.boundary(pot, n, theta=0.0)
    if frame_name == "singularity":
        return RescaleFrame.singularity(pot, n)
    raise ValueError(f"unknown frame {frame_name!r}")


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------


def _ward_default_points(spec: LimitKernelSpec, axis, fd_step):
    pts = (axis[None, :] + 1j * axis[:, None]).ravel()
    if spec.kind == "hard_edge":
        pts = pts[pts.real <= -2.0 * fd_step + 1e-15]
    if spec.kind == "mittag_leffler":
        pts = pts[(np.abs(pts) <= 1.5 + 1e-12) & (np.abs(pts) > 1e-12)]
    return [complex(p) for p in pts]


def _verify_ward(args, spec, quad) -> tuple:
    if args.grid:
        axis = parse_grid(args.grid)
    elif spec.kind == "hard_edge":
        axis = None
    elif spec.kind == "mittag_leffler":
        axis = parse_grid("-1.25:1.25:0.5")
    else:
        axis = parse_grid("-2:2:0.5")
    if axis is None:
        xs = parse_grid("-2:-0.2:0.3")
        ys = parse_grid("-1:1:0.5")
        pts = [complex(x, y) for y in ys for x in xs]
    else:
        pts = _ward_default_points(spec, axis, args.fd_step)

    threads = max(1, args.threads)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(
                lambda z: abs(ward_point_residual(spec, z, quad, args.fd_step)), pts
            ))
    else:
        vals = [abs(ward_point_residual(spec, z, quad, args.fd_step)) for z in pts]
    rows = [(z.real, z.imag, float(v)) for z, v in zip(pts, vals)]
    sup = max(vals) if vals else 0.0
    return rows, {"sup_norm": float(sup), "points": len(pts)}, float(sup)


def _verify_mass_one(args, spec, quad) -> tuple:
    defaults = {
        "bulk": "0,1+1j",
        "free_boundary": "0,1,-1+1j,-2",
        "hard_edge": "-0.5,-1-1j",
        "mittag_leffler": "0,0.5,1+0.5j",
        "constant": "0.3",
    }
    pts = _parse_points(args.points or defaults[spec.kind], args.seed)
    vals = [mass_one_residual(spec, z, quad) for z in pts]
    rows = [(z.real, z.imag, float(abs(v))) for z, v in zip(pts, vals)]
    sup = max(abs(v) for v in vals)
    results = {"sup_norm": float(sup), "residuals": [float(v) for v in vals]}
    if spec.kind == "constant":
        # counterexample: the profile is not a boundary profile, and the
        # mass-one equation must miss by exactly level - 1
        sup = max(abs(v - (spec.level - 1.0)) for v in vals)
        results["expected_defect"] = spec.level - 1.0
    return rows, results, float(sup)


def _verify_series(args) -> tuple:
    xs = parse_grid(args.grid) if args.grid else parse_grid("-4:4:0.5")
    n_terms = args.n or 80
    rows, sup = [], 0.0
    for x in xs:
        m = mass_one_series_residual(float(x), n_terms)
        h = hermite_identity_residual(2.0 * float(x), n_terms)
        rows.append((float(x), 0.0, float(max(abs(m), abs(h)))))
        sup = max(sup, abs(m), abs(h))
    tele = telescoping_sum(1.2, n_terms)
    sup = max(sup, abs(tele - 1.0))
    return rows, {"sup_norm": float(sup), "telescoping": float(tele),
                  "n_terms": n_terms}, float(sup)


def _verify_eighth(args) -> tuple:
    val = eighth_formula()
    shifted = eighth_formula(shift=0.5)
    dev = abs(val - 0.125)
    rows = [(0.0, 0.0, float(dev)), (0.5, 0.0, float(abs(shifted - 0.125)))]
    print(f"eighth formula: {val:.12f} (target 0.125), shifted a=0.5: {shifted:.12f}")
    return rows, {
        "sup_norm": float(dev),
        "value": float(val),
        "shifted_value": float(shifted),
        "shifted_deviation_exceeds_1e-3": bool(abs(shifted - 0.125) > 1e-3),
    }, float(dev)


def _verify_inequalities(args) -> tuple:
    report = inequality_suite(seed=args.seed)
    violation = max(0.0, -report.params["min_margin"])
    rows = [(float(i), 0.0, float(m)) for i, m in enumerate(report.residuals)]
    results = dict(report.params)
    results["sup_norm"] = float(violation)
    return rows, results, float(violation)


def _verify_positivity(args, spec) -> tuple:
    count = 8
    if args.points and args.points.startswith("random:"):
        count = int(args.points.split(":", 1)[1])
    rng = np.random.default_rng(args.seed)
    worst = math.inf
    rows = []
    for k in range(args.sets):
        pts = rng.uniform(-2.0, 2.0, size=(count, 2))
        zs = [complex(x, y) for x, y in pts]
        eig = gram_min_eig(spec, zs, complementary=args.complementary)
        worst = min(worst, eig)
        rows.append((float(k), 0.0, float(eig)))
    violation = max(0.0, -worst)
    return rows, {"sup_norm": float(violation), "min_eigenvalue": float(worst),
                  "sets": args.sets, "points_per_set": count,
                  "complementary": bool(args.complementary)}, float(violation)


def _verify_polarized(args, spec, quad) -> tuple:
    pairs = {
        "free_boundary": [(0.5 + 0.0j, -0.3 + 0.4j), (0.0j, 1.0 + 0.0j)],
        "hard_edge": [(-0.5 + 0.0j, -1.0 - 0.5j), (-0.3 + 0.2j, -1.5 + 0.0j)],
    }.get(spec.kind)
    if pairs is None:
        raise ValueError("polarized verification needs free-boundary or hard-edge spec")
    rows, sup = [], 0.0
    for z, w in pairs:
        r = abs(polarized_mass_one_residual(spec, z, w, quad))
        rows.append((z.real, z.imag, float(r)))
        sup = max(sup, r)
    return rows, {"sup_norm": float(sup), "pairs": len(pairs)}, float(sup)


def cmd_verify(args) -> int:
    spec = parse_spec(args.spec)
    quad = parse_quad(args.quad) if args.quad else QuadratureConfig()
    equation = args.equation
    if equation == "ward":
        rows, results, sup = _verify_ward(args, spec, quad)
    elif equation == "mass-one":
        rows, results, sup = _verify_mass_one(args, spec, quad)
    elif equation == "series":
        rows, results, sup = _verify_series(args)
    elif equation == "eighth":
        rows, results, sup = _verify_eighth(args)
    elif equation == "inequalities":
        rows, results, sup = _verify_inequalities(args)
    elif equation == "positivity":
        rows, results, sup = _verify_positivity(args, spec)
    elif equation == "polarized":
        rows, results, sup = _verify_polarized(args, spec, quad)
    else:  # pragma: no cover - argparse choices guard this
        raise ValueError(f"unknown equation {equation!r}")

    tol = threshold_for(equation, spec.kind)
    passed = sup <= tol
    tag = f"{equation}_{_slug(args.spec)}"
    _write_csv(_out_path(args, f"verify_{tag}.csv"), ("x", "y", "residual"), rows)
    config = {"equation": equation, "spec": args.spec, "grid": args.grid,
              "quad": args.quad, "fd_step": args.fd_step, "seed": args.seed,
              "points": args.points, "sets": args.sets,
              "complementary": bool(args.complementary), "n": args.n,
              "threads": args.threads}
    results = dict(results)
    results.update({"threshold": tol, "passed": bool(passed)})
    _write_json(_out_path(args, f"verify_{tag}.json"), "verify", config, results)
    print(f"verify {equation} [{args.spec}]: sup residual {sup:.6e} "
          f"{'<=' if passed else '>'} threshold {tol:g} -> "
          f"{'PASS' if passed else 'FAIL'}")
    return EXIT_PASS if passed else EXIT_FAIL


# --------------------------------------------------------------------------
# converge
# --------------------------------------------------------------------------


def cmd_converge(args) -> int:
    n_list = [int(p) for p in args.n_list.split(",")]
    if args.sections:
        xs = parse_grid(args.grid) if args.grid else parse_grid("-2:2:0.25")
        rows, table = [], {}
        for n in n_list:
            devs_f, devs_wopp = [], []
            for x in xs:
                s = exp_section(n, float(x))
                f = float(plasma_F(float(x)).real)
                devs_f.append(abs(s - f))
                devs_wopp.append(abs(s - f * math.exp(x * x / 4.0)))
                rows.append((float(n), float(x), float(s)))
            table[str(n)] = {"sup_dev_vs_F": float(max(devs_f)),
                             "sup_dev_vs_F_exp_quarter": float(max(devs_wopp))}
            print(f"sections n={n}: sup |section - F(x)| = {max(devs_f):.6f}, "
                  f"sup |section - e^(x^2/4)F(x)| = {max(devs_wopp):.6f}")
        _write_csv(_out_path(args, "converge_sections.csv"), ("n", "x", "section"), rows)
        _write_json(_out_path(args, "converge_sections.json"), "converge",
                    {"mode": "sections", "n_list": args.n_list, "grid": args.grid},
                    table)
        return EXIT_PASS

    pot = parse_pot(args.pot)
    spec = parse_spec(args.spec)
    xs = parse_grid(args.grid) if args.grid else parse_grid("-3:3:0.25")
    rows, sups = [], {}
    for n in n_list:
        frame = _make_frame(pot, n, args.frame)
        devs = []
        for x in xs:
            z = complex(x)
            if spec.kind == "hard_edge" and z.real >= 0.0:
                continue
            r_n = float(rescaled_kernel(pot, frame, z, z).real)
            devs.append(abs(r_n - one_point(spec, z)))
            rows.append((float(n), float(x), float(r_n)))
        sups[str(n)] = float(max(devs))
        print(f"converge {args.pot} {args.frame} n={n}: sup |R_n - R| = {max(devs):.6f}")
    ratios = {
        f"{a}->{b}": sups[str(a)] / sups[str(b)]
        for a, b in zip(n_list, n_list[1:])
    }
    tag = f"{_slug(args.pot)}_{args.frame}"
    _write_csv(_out_path(args, f"converge_{tag}.csv"), ("n", "x", "R_n"), rows)
    _write_json(_out_path(args, f"converge_{tag}.json"), "converge",
                {"pot": args.pot, "frame": args.frame, "n_list": args.n_list,
                 "spec": args.spec, "grid": args.grid},
                {"sup_errors": sups, "ratios": ratios})
    return EXIT_PASS


# --------------------------------------------------------------------------
# sample
# --------------------------------------------------------------------------


def cmd_sample(args) -> int:
    pot = parse_pot(args.pot)
    cfg = SampleConfig(pot=pot, n=args.n, trials=args.trials, seed=args.seed)
    threads = max(1, args.threads)
    if args.frame == "singularity":
        lo, hi = (0.0, 4.0)
        if args.window:
            lo, hi = (float(p) for p in args.window.split(":"))
        hist = bulk_singularity_profile(cfg, (lo, hi, args.bins), threads=threads)
        lam = pot.lam if pot.kind == "power" else 1.0
        target = [
            float(mittag_leffler_kernel_eval(lam, s * s).real)
            * math.exp(-abs(s) ** (2 * lam))
            for s in hist.bin_centers()
        ]
    elif args.frame == "boundary":
        lo, hi = (-3.0, 1.0)
        if args.window:
            lo, hi = (float(p) for p in args.window.split(":"))
        frame = _make_frame(pot, args.n, "boundary")
        hist = boundary_profile(cfg, frame, (lo, hi, args.bins), threads=threads)
        if pot.kind == "hard_edge":
            target = [
                float(hard_edge_H(complex(2.0 * x)).real) if x < 0 else 0.0
                for x in hist.bin_centers()
            ]
        else:
            target = [float(plasma_F(2.0 * x).real) for x in hist.bin_centers()]
    else:
        raise ValueError("sample frame must be boundary or singularity")

    est, se = hist.estimates(), hist.stderrs()
    rows = list(zip(
        (float(c) for c in hist.bin_centers()),
        (float(e) for e in est),
        (float(s) for s in se),
    ))
    dev = np.abs(est - np.array(target))
    tag = f"{_slug(args.pot)}_{args.frame}"
    _write_csv(_out_path(args, f"sample_{tag}.csv"), ("bin_center", "estimate", "stderr"), rows)
    config = {"pot": args.pot, "n": args.n, "trials": args.trials,
              "seed": args.seed, "frame": args.frame, "bins": args.bins,
              "window": args.window}
    _write_json(_out_path(args, f"sample_{tag}.json"), "sample", config, {
        "total_counts": int(hist.counts.sum()),
        "max_abs_deviation": float(dev.max()),
        "max_deviation_over_3se": float(np.max(dev - 3.0 * se)),
        "bins_within_3se_plus_bias": int(np.sum(dev <= 3.0 * se + 0.02)),
        "bins": int(hist.bins),
    })
    print(f"sample {args.pot} {args.frame}: {hist.counts.sum()} counts, "
          f"max |est - target| = {dev.max():.4f}")
    return EXIT_PASS


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--out", default=".", help="output directory for CSV/JSON")
    sub.add_argument("--threads", type=int,
                     default=int(os.environ.get("PLASMA_KERNEL_THREADS", "1")))
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--config", default=None,
                     help="JSON file of defaults; explicit flags win")


# argparse only recognizes bare negative numbers as option values; widen the
# matcher so grid/window strings like -3:3:0.1 are read as values, not flags.
_VALUE_MATCHER = re.compile(r"^-\d+(\.\d+)?([:,].*)?$|^-\.\d+([:,].*)?$")


def _allow_negative_values(parser: argparse.ArgumentParser) -> None:
    parser._negative_number_matcher = _VALUE_MATCHER
    for action in parser._actions:
        for choice_parser in getattr(action, "choices", {}).values() if isinstance(
            action, argparse._SubParsersAction
        ) else ():
            _allow_negative_values(choice_parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plasma-kernel",
        description="Correlation-kernel evaluation and verification toolkit",
    )
    parser.add_argument("--show-thresholds", action="store_true",
                        help="print the versioned thresholds table and exit")
    sub = parser.add_subparsers(dest="command")

    p_eval = sub.add_parser("eval", help="kernel one-point values on a grid")
    group = p_eval.add_mutually_exclusive_group(required=True)
    group.add_argument("--limit", help="limit spec, e.g. free-boundary, ml:2")
    group.add_argument("--finite", help="potential, e.g. ginibre, power:2")
    p_eval.add_argument("--grid", default="-3:3:0.1")
    p_eval.add_argument("--n", type=int, default=64)
    p_eval.add_argument("--frame", default="boundary",
                        choices=("bulk", "boundary", "singularity"))
    _add_common(p_eval)

    p_ver = sub.add_parser("verify", help="residual checks vs thresholds")
    p_ver.add_argument("equation", choices=(
        "ward", "mass-one", "series", "eighth", "inequalities",
        "positivity", "polarized"))
    p_ver.add_argument("--spec", default="free-boundary")
    p_ver.add_argument("--grid", default=None)
    p_ver.add_argument("--quad", default=None, help="r_max,nr,na")
    p_ver.add_argument("--fd-step", type=float, default=1e-3)
    p_ver.add_argument("--points", default=None,
                       help="comma-separated complex points or random:N")
    p_ver.add_argument("--sets", type=int, default=100)
    p_ver.add_argument("--complementary", action="store_true")
    p_ver.add_argument("--n", type=int, default=None,
                       help="series truncation order (default 80)")
    _add_common(p_ver)

    p_con = sub.add_parser("converge", help="finite-n convergence tables")
    p_con.add_argument("--pot", default="ginibre")
    p_con.add_argument("--frame", default="boundary",
                       choices=("bulk", "boundary", "singularity"))
    p_con.add_argument("--n-list", default="64,256,1024")
    p_con.add_argument("--spec", default="free-boundary")
    p_con.add_argument("--grid", default=None)
    p_con.add_argument("--sections", action="store_true",
                       help="compare edge sections of e^(nzw) instead")
    _add_common(p_con)

    p_sam = sub.add_parser("sample", help="Monte Carlo radial profiles")
    p_sam.add_argument("--pot", default="ginibre")
    p_sam.add_argument("--n", type=int, default=1024)
    p_sam.add_argument("--trials", type=int, default=4000)
    p_sam.add_argument("--frame", default="boundary",
                       choices=("boundary", "singularity"))
    p_sam.add_argument("--bins", type=int, default=40)
    p_sam.add_argument("--window", default=None, help="lo:hi histogram window")
    _add_common(p_sam)
    _allow_negative_values(parser)
    return parser


def _apply_config_file(args, parser) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        overrides = json.load(fh)
    defaults = {}
    # argparse has no public introspection API; walk the active
    # subcommand's actions so its option defaults are recognized
    for action in parser._actions:  # noqa: SLF001
        if isinstance(action, argparse._SubParsersAction):  # noqa: SLF001
            chosen = action.choices.get(args.command)
            if chosen is not None:
                for sub_action in chosen._actions:  # noqa: SLF001
                    defaults[sub_action.dest] = sub_action.default
        else:
            defaults[action.dest] = action.default
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ValueError(f"unknown config key {key!r}")
        # flags given explicitly (differing from their default) win
        if getattr(args, dest) == defaults.get(dest):
            setattr(args, dest, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.show_thresholds:
        _show_thresholds()
        return EXIT_PASS
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        _apply_config_file(args, parser)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "converge":
            return cmd_converge(args)
        if args.command == "sample":
            return cmd_sample(args)
        parser.error(f"unknown command {args.command!r}")
    except _NUMERIC_ERRORS as exc:
        print(f"numeric non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
