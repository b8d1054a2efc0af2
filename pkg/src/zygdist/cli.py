"""Command-line interface: file ingestion, generators, and report emission.

This is the only module with side effects.  Inputs are self-describing JSON
documents; every command emits a schema-versioned JSON report whose numbers
all carry their method parameters (grid, depths, stabilisation threshold).
Reports are byte-identical for identical input and seed: wall-clock time is
only included when explicitly requested.

Exit codes: 0 success; 2 malformed input or violated invariant; 3 threshold
estimate inconclusive at the requested depths (profiles are still emitted).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, is_dataclass
from fractions import Fraction

import numpy as np

from zygdist.approximation import (
    continuous_decompose,
    distance_report,
    dyadic_decompose,
)
from zygdist.functionals import (
    box_square_energy,
    cone_levelset_count,
    default_eps_grid,
    levelset_tree_density,
    lp_norm,
    zygmund_seminorm,
)
from zygdist.generators import (
    cascade_measure,
    hat_function,
    lacunary_function,
    linear_function,
    parabola_function,
    random_jump_martingale,
    single_branch_martingale,
    weierstrass_function,
)
from zygdist.martingale import (
    SampledFunction,
    average_growth,
    bmo_norm,
    dyadic_zygmund_seminorm,
    integrate,
    star_norm,
)
from zygdist.measures import (
    GridMeasure,
    measure_tree_levelset_density,
    measure_truncate,
    measure_zygmund_norm,
)
from zygdist.verification import (
    run_lemma_suite,
    verify_bdg,
    verify_predecessor_measure,
    verify_strichartz_consistency,
)

SCHEMA = "zygdist/1"
EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3


class InputError(Exception):
    """Malformed input file or violated report invariant (exit code 2)."""


# ---------------------------------------------------------------------------
# file formats


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InputError(message)


def read_input(path: str):
    """Load an input document, returning the payload and its byte digest."""
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read input file: {exc}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"input is not valid JSON: {exc}") from None
    _require(isinstance(payload, dict), "input document must be a JSON object")
    _require(payload.get("schema") == SCHEMA, f"schema must be {SCHEMA!r}")
    return payload, digest


def load_function(payload: dict) -> SampledFunction:
    _require(payload.get("schema") == SCHEMA, f"schema must be {SCHEMA!r}")
    _require(payload.get("kind") == "function", "kind must be 'function'")
    depth = payload.get("depth")
    _require(isinstance(depth, int) and depth >= 1, "depth must be an integer >= 1")
    left = payload.get("left", 0)
    _require(isinstance(left, int), "left endpoint must be an integer")
    values = payload.get("values")
    _require(isinstance(values, list) and values, "values must be a non-empty array")
    span, rem = divmod(len(values) - 1, 1 << depth)
    _require(
        rem == 0 and span >= 1,
        f"values length {len(values)} must be span*2^depth + 1",
    )
    array = np.asarray(values, dtype=np.float64)
    _require(bool(np.all(np.isfinite(array))), "values must all be finite")
    return SampledFunction(array, left=left, log2_spacing=-depth)


def load_measure(payload: dict) -> GridMeasure:
    _require(payload.get("schema") == SCHEMA, f"schema must be {SCHEMA!r}")
    _require(payload.get("kind") == "measure", "kind must be 'measure'")
    dim = payload.get("dim")
    depth = payload.get("depth")
    _require(isinstance(dim, int) and dim >= 1, "dim must be an integer >= 1")
    _require(isinstance(depth, int) and depth >= 1, "depth must be an integer >= 1")
    masses = payload.get("masses")
    _require(isinstance(masses, list) and masses, "masses must be a non-empty array")
    cells = 1 << (dim * depth)
    _require(
        len(masses) == cells,
        f"masses length {len(masses)} must equal 2^(dim*depth) = {cells}",
    )
    array = np.asarray(masses, dtype=np.float64)
    _require(bool(np.all(np.isfinite(array))), "masses must all be finite")
    return GridMeasure(array.reshape((1 << depth,) * dim))


def function_payload(f: SampledFunction, metadata: dict) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "function",
        "depth": f.depth,
        "left": int(f.left),
        "values": [float(v) for v in f.values],
        "metadata": metadata,
    }


def measure_payload(masses: np.ndarray, dim: int, depth: int, metadata: dict) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "measure",
        "dim": dim,
        "depth": depth,
        "masses": [float(v) for v in masses.reshape(-1)],
        "metadata": metadata,
    }


# ---------------------------------------------------------------------------
# report plumbing


def _jsonable(value):
    if is_dataclass(value) and not isinstance(value, type):
        return _jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, Fraction)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _table(columns: list[str], rows: list, method: dict) -> dict:
    return {"columns": columns, "rows": _jsonable(rows), "method": _jsonable(method)}


def _parse_depths(text: str | None, fallback: list[int]) -> list[int]:
    if text is None:
        return fallback
    try:
        depths = sorted({int(part) for part in text.split(",") if part.strip()})
    except ValueError:
        raise InputError(f"cannot parse depth list {text!r}") from None
    _require(bool(depths) and depths[0] >= 1, "depths must be positive integers")
    return depths


def _parse_eps_grid(text: str, auto: list[float]) -> list[float]:
    if text == "auto":
        return auto
    try:
        grid = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InputError(f"cannot parse level grid {text!r}") from None
    _require(bool(grid), "level grid must be non-empty")
    _require(all(e >= 0.0 for e in grid), "grid levels must be non-negative")
    return sorted(grid)


def _measure_eps_grid(mu: GridMeasure) -> list[float]:
    norm = measure_zygmund_norm(mu, mode="dyadic")
    if norm == 0.0:
        return [0.0]
    return [norm * 2.0 ** (j / 2.0) for j in range(-20, 3)]


def _parameters(args, **extra) -> dict:
    params = {"seed": args.seed}
    params.update(extra)
    return _jsonable(params)


# ---------------------------------------------------------------------------
# commands


def cmd_seminorm(args) -> tuple[dict, int]:
    payload, digest = read_input(args.input)
    f = load_function(payload)
    growth = average_growth(f)
    rows = [
        ["dyadic_zygmund", dyadic_zygmund_seminorm(f)],
        ["grid_zygmund", zygmund_seminorm(f)],
        ["growth_star", star_norm(growth)],
        ["growth_bmo", bmo_norm(growth)],
    ]
    body = {
        "input_sha256": digest,
        "tables": {
            "seminorms": _table(
                ["name", "value"],
                rows,
                {
                    "dyadic": "exact supremum over the jump tree",
                    "grid": "exhaustive over grid-resolvable centres and steps",
                },
            )
        },
    }
    return body, EXIT_OK


def cmd_strichartz(args) -> tuple[dict, int]:
    payload, digest = read_input(args.input)
    f = load_function(payload)
    depths = _parse_depths(args.depths, [max(1, f.depth - 4), f.depth])
    _require(max(depths) <= f.depth, "requested depth exceeds the sample depth")
    grid = _parse_eps_grid(args.eps_grid, default_eps_grid(f))
    tree_rows = [
        [e, d, levelset_tree_density(f, e, depth=d)] for e in grid for d in depths
    ]
    cone_rows = [
        [e, d, lp_norm(cone_levelset_count(f, e, d), 2.0)]
        for e in grid
        for d in depths
    ]
    energy_rows = [[d, box_square_energy(f, depth=d)] for d in depths]
    method = {"depths": depths, "eps_grid": args.eps_grid}
    body = {
        "input_sha256": digest,
        "tables": {
            "tree_density": _table(["eps", "depth", "value"], tree_rows, method),
            "cone_count_l2": _table(["eps", "depth", "value"], cone_rows, method),
            "box_energy": _table(["depth", "value"], energy_rows, method),
        },
    }
    return body, EXIT_OK


def cmd_distance(args) -> tuple[dict, int]:
    payload, digest = read_input(args.input)
    f = load_function(payload)
    depths = _parse_depths(args.depths, None) if args.depths else None
    if depths is not None:
        _require(max(depths) <= f.depth, "requested depth exceeds the sample depth")
    grid = None
    if args.eps_grid != "auto":
        grid = _parse_eps_grid(args.eps_grid, [])
    report = distance_report(f, eps_grid=grid, depths=depths, tau=args.tau)
    profile = report.profile
    profile_rows = [
        [profile.eps[j], profile.depths[i], profile.values[i][j]]
        for i in range(len(profile.depths))
        for j in range(len(profile.eps))
    ]
    distance_rows = [
        [report.eps[j], report.measured_distance[j]] for j in range(len(report.eps))
    ]
    estimate = report.estimate
    value = estimate.eps
    rule = estimate.method
    if args.interpolate and value is not None:
        j = report.eps.index(value)
        if j > 0:
            value = math.sqrt(report.eps[j] * report.eps[j - 1])
            rule = estimate.method + "+log-midpoint"
    method = {
        "depths": profile.depths,
        "eps_grid": args.eps_grid,
        "tau": args.tau,
        "rule": rule,
    }
    body = {
        "input_sha256": digest,
        "tables": {
            "density_profile": _table(["eps", "depth", "value"], profile_rows, method),
            "measured_distance": _table(
                ["eps", "value"],
                distance_rows,
                {"estimator": "twice the sup of dropped jumps"},
            ),
            "stability": _table(
                ["eps", "ratio", "stable"],
                [
                    [profile.eps[j], estimate.ratios[j], estimate.stable[j]]
                    for j in range(len(profile.eps))
                ],
                method,
            ),
        },
        "estimates": {"threshold": {"value": value, "method": method}},
    }
    return body, EXIT_OK if value is not None else EXIT_INCONCLUSIVE


def cmd_decompose(args) -> tuple[dict, int]:
    payload, digest = read_input(args.input)
    f = load_function(payload)
    grid = _parse_eps_grid(args.eps_grid, default_eps_grid(f))
    rows = []
    for eps in grid:
        if eps <= 0.0:
            continue
        parts = dyadic_decompose(f, eps)
        identity = bool(
            np.array_equal(parts.rough.values + parts.small.values, f.values)
        )
        small_norm = dyadic_zygmund_seminorm(parts.small)
        _require(identity, "decomposition failed to reproduce the input exactly")
        _require(
            small_norm <= eps,
            f"small-part seminorm {small_norm} exceeds requested level {eps}",
        )
        rows.append(
            [eps, small_norm, star_norm(parts.kept), bmo_norm(parts.kept)]
        )
    body = {
        "input_sha256": digest,
        "tables": {
            "decomposition": _table(
                ["eps", "small_seminorm", "rough_star", "rough_bmo"],
                rows,
                {"eps_grid": args.eps_grid, "rule": "drop jumps at most eps/2"},
            )
        },
    }
    return body, EXIT_OK


def cmd_sobolev(args) -> tuple[dict, int]:
    payload, digest = read_input(args.input)
    f = load_function(payload)
    grid = _parse_eps_grid(args.eps_grid, default_eps_grid(f))
    rows = []
    for eps in grid:
        if eps <= 0.0:
            continue
        try:
            parts = continuous_decompose(f, eps)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        window_max = max(parts.window_small_seminorms, default=0.0)
        _require(
            window_max <= eps,
            f"window seminorm {window_max} exceeds requested level {eps}",
        )
        identity = bool(
            np.array_equal(parts.rough.values + parts.small.values, f.values)
        )
        _require(identity, "decomposition failed to reproduce the input exactly")
        rows.append([eps, window_max, zygmund_seminorm(parts.small)])
    body = {
        "input_sha256": digest,
        "tables": {
            "window_decomposition": _table(
                ["eps", "window_max_seminorm", "small_grid_seminorm"],
                rows,
                {
                    "eps_grid": args.eps_grid,
                    "rule": "average window truncations over all grid offsets",
                },
            )
        },
    }
    return body, EXIT_OK


def cmd_measure(args) -> tuple[dict, int]:
    payload, digest = read_input(args.input)
    mu = load_measure(payload)
    depths = _parse_depths(args.depths, [max(1, mu.depth - 2), mu.depth])
    _require(max(depths) <= mu.depth, "requested depth exceeds the grid depth")
    grid = _parse_eps_grid(args.eps_grid, _measure_eps_grid(mu))
    norm_rows = [
        ["dyadic_zygmund", measure_zygmund_norm(mu, mode="dyadic")],
        ["grid_zygmund", measure_zygmund_norm(mu, mode="continuous")],
    ]
    density_rows = [
        [e, d, measure_tree_levelset_density(mu, e, depth=d)]
        for e in grid
        for d in depths
    ]
    truncation_rows = []
    for eps in grid:
        if eps <= 0.0:
            continue
        kept = measure_truncate(mu, eps)
        residual_norm = measure_zygmund_norm(mu - kept, mode="dyadic")
        _require(
            residual_norm <= eps,
            f"residual deviation {residual_norm} exceeds requested level {eps}",
        )
        truncation_rows.append([eps, residual_norm])
    method = {"depths": depths, "eps_grid": args.eps_grid}
    body = {
        "input_sha256": digest,
        "tables": {
            "norms": _table(
                ["name", "value"],
                norm_rows,
                {"dyadic": "exact supremum over density splits"},
            ),
            "tree_density": _table(["eps", "depth", "value"], density_rows, method),
            "truncation": _table(
                ["eps", "residual_dyadic_norm"],
                truncation_rows,
                {"rule": "drop splits of size at most eps"},
            ),
        },
    }
    return body, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    suites = (
        ["lemmas", "predecessor", "bdg", "consistency"]
        if args.suite == "all"
        else [args.suite]
    )
    body: dict = {"suites": suites}
    passed = True
    if "lemmas" in suites:
        suite = run_lemma_suite(seed=args.seed)
        body["ratio_reports"] = _jsonable(suite["reports"])
        passed &= suite["passed"]
    if "predecessor" in suites:
        rows = []
        for R in (1, 2, 4):
            report = verify_predecessor_measure(R, seed=args.seed)
            rows.append(report)
            passed &= all(report.level_ok) and report.total_ok
        body["predecessor"] = _jsonable(rows)
    if "bdg" in suites:
        report = verify_bdg(count=100, depth=10, seed=args.seed)
        body["bdg"] = _jsonable(report)
        passed &= report["in_range"]
    if "consistency" in suites:
        report = verify_strichartz_consistency(depth=12, seed=args.seed, tau=args.tau)
        body["consistency"] = _jsonable(report)
        passed &= report["mismatches"] == 0
    body["passed"] = bool(passed)
    if not passed:
        raise InputError("verification suite found a violated estimate")
    return body, EXIT_OK


_CLASSIFICATIONS = {
    "linear": "flat: every profile vanishes",
    "hat": "single kink: profiles bounded at every level",
    "square": "smooth curvature: profiles bounded at every level",
    "weierstrass": "classical rough example: bounded seminorm, growing profiles",
    "lacunary": "uniform jump size at every scale: growing profiles",
    "random-jumps": "random signs, constant jump size: threshold at twice the size",
    "single-branch": "one growing branch: extremal truncated quadratic",
    "cascade": "multiplicative cascade: signed density splits",
}


def _fraction(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse {flag} value {text!r} as a rational") from None


def cmd_generate(args) -> tuple[dict, int]:
    kind = args.kind
    depth = args.depth
    _require(depth >= 1, "depth must be a positive integer")
    metadata: dict = {"generator": kind, "seed": args.seed, "depth": depth}
    metadata["classification"] = _CLASSIFICATIONS[kind]
    if kind == "cascade":
        thetas = None
        if args.thetas is not None:
            thetas = [_fraction(part, "--thetas") for part in args.thetas.split(",")]
            metadata["thetas"] = [float(t) for t in thetas]
        masses = cascade_measure(args.dim, depth, thetas=thetas, seed=args.seed)
        metadata["dim"] = args.dim
        return measure_payload(np.asarray(masses), args.dim, depth, metadata), EXIT_OK
    if kind == "linear":
        f = linear_function(depth)
    elif kind == "hat":
        f = hat_function(depth)
    elif kind == "square":
        f = parabola_function(depth)
    elif kind == "weierstrass":
        f = weierstrass_function(depth, levels=args.levels)
        if args.levels is not None:
            metadata["levels"] = args.levels
    elif kind == "lacunary":
        coefficient = _fraction(args.coefficient, "--coefficient")
        ratio = _fraction(args.ratio, "--ratio")
        f = lacunary_function(depth, coefficient=coefficient, ratio=ratio)
        metadata["coefficient"] = float(coefficient)
        metadata["ratio"] = float(ratio)
    elif kind == "random-jumps":
        delta = _fraction(args.delta or "1/16", "--delta")
        f = integrate(random_jump_martingale(depth, delta=delta, seed=args.seed))
        metadata["delta"] = float(delta)
        metadata["expected_distance_threshold"] = float(2 * delta)
    elif kind == "single-branch":
        delta = _fraction(args.delta or "1/2", "--delta")
        f = integrate(single_branch_martingale(depth, delta=delta))
        metadata["delta"] = float(delta)
        metadata["expected_distance_threshold"] = float(2 * delta)
    else:
        raise InputError(f"unknown generator kind {kind!r}")
    metadata["dyadic_seminorm"] = float(dyadic_zygmund_seminorm(f))
    return function_payload(f, metadata), EXIT_OK


# ---------------------------------------------------------------------------
# argument surface


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zygdist",
        description="Distance functionals, decompositions and estimate checks "
        "for dyadic regularity analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--in", dest="input", required=True, help="input file")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--depths", help="comma-separated depth list")
        p.add_argument(
            "--eps-grid",
            default="auto",
            help="'auto' or a comma-separated list of levels",
        )
        p.add_argument("--tau", type=float, default=0.1)
        p.add_argument("--threads", type=int, default=0, help="accepted; reductions are deterministic regardless")
        p.add_argument("--interpolate", action="store_true")
        p.add_argument(
            "--timing",
            action="store_true",
            help="include wall time (makes reports differ between runs)",
        )

    for name, handler in [
        ("seminorm", cmd_seminorm),
        ("strichartz", cmd_strichartz),
        ("distance-ibmo", cmd_distance),
        ("decompose", cmd_decompose),
        ("sobolev", cmd_sobolev),
        ("measure", cmd_measure),
    ]:
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(handler=handler)

    p = sub.add_parser("verify")
    common(p, needs_input=False)
    p.add_argument(
        "--suite",
        default="all",
        choices=["lemmas", "predecessor", "bdg", "consistency", "all"],
    )
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("generate")
    common(p, needs_input=False)
    p.add_argument("--kind", required=True, choices=sorted(_CLASSIFICATIONS))
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--delta", help="jump size as a rational, e.g. 1/16")
    p.add_argument("--levels", type=int)
    p.add_argument("--coefficient", default="1/2")
    p.add_argument("--ratio", default="1/2")
    p.add_argument("--thetas", help="comma-separated split sizes")
    p.set_defaults(handler=cmd_generate)
    return parser


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        body, code = args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "generate":
        report = body
    else:
        report = {
            "schema": SCHEMA,
            "command": args.command,
            "parameters": _parameters(
                args,
                tau=args.tau,
                interpolate=args.interpolate,
            ),
        }
        report.update(body)
    if args.timing:
        report["wall_time_s"] = time.monotonic() - start
    _emit(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
