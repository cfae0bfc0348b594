"""Command-line interface.

Data goes to standard output, diagnostics to standard error.  Exit codes:
0 success, 1 malformed input, 2 precondition or assumption failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ._linalg import DEFAULT_TOL
from .counterexample import a_counterexample, recomposition_error, theta_counterexample
from .generator import (
    GeneratorSpec,
    IDENTITY_ANCHORED,
    PLANTED_MASKING,
    POLICIES,
    decay_stats,
    default_split,
    random_design,
    random_model,
)
from .matrix_io import (
    format_bundle,
    format_matrix_csv,
    load_bundle,
    read_design_csv,
    read_matrix_csv,
)
from .oracle import a_nonidentifiability_witness, intersection_set_bruteforce
from .recovery import column_space, recover

TOL_ENV_VAR = "QIDENT_TOL"

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_DOMAIN = 2


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_BAD_INPUT
    return args.handler(args)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qident",
        description=(
            "Decide which factors and loadings a binary design identifies, recover "
            "identifiable factors from data, and construct alternative factorizations "
            "witnessing every non-identifiability."
        ),
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("analyze", help="identifiability report for a design CSV")
    p.add_argument("q_csv", help="design matrix CSV (0/1 entries, no header)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--paranoid", action="store_true", help="cross-check against the brute-force oracle")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("check", help="verify the model assumptions on a bundle")
    p.add_argument("bundle", help="model bundle JSON")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--paranoid", action="store_true", help="cross-check loading verdicts against the null-space oracle")
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("recover", help="recover identifiable factors and loadings from data")
    p.add_argument("m_csv", help="data matrix CSV")
    p.add_argument("q_csv", help="design matrix CSV")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--paranoid", action="store_true", help="cross-check subspace dimensions against the design verdicts")
    p.set_defaults(handler=_cmd_recover)

    p = sub.add_parser("counterexample", help="emit an alternative factorization of the same data")
    p.add_argument("bundle", help="model bundle JSON")
    p.add_argument("--column", type=int, required=True, help="1-based column to perturb")
    p.add_argument("--loading", action="store_true", help="perturb the loading column instead of the score column")
    p.add_argument("--eps", type=float, default=None, help="perturbation size (default: safe budget)")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=_cmd_counterexample)

    p = sub.add_parser("generate", help="write a random valid model bundle")
    p.add_argument("--n", type=int, required=True, help="score rows")
    p.add_argument("--j", type=int, required=True, help="items")
    p.add_argument("--k", type=int, required=True, help="factors")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=POLICIES, default=None, help="pattern policy (default: identity-anchored, or planted-masking when --plant is given)")
    p.add_argument("--plant", default=None, help='masking pairs to plant, 1-based, e.g. "2>1,3>1" (2 masks 1, 3 masks 1)')
    p.add_argument("--entry-scale", type=float, default=1.0)
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("demo", help="built-in demonstrations")
    demo_sub = p.add_subparsers(dest="demo_command")
    d = demo_sub.add_parser("decay", help="decaying-columns table: independence survives while the scaled spectrum collapses")
    d.add_argument("--n", type=int, required=True, help="largest row count")
    d.set_defaults(handler=_cmd_demo_decay)
    p.set_defaults(handler=_cmd_demo_help)

    return parser


def _fail(message: str, code: int) -> int:
    print(f"qident: error: {message}", file=sys.stderr)
    return code


def _resolve_tol(args) -> float:
    tol = getattr(args, "tol", None)
    if tol is None:
        env = os.environ.get(TOL_ENV_VAR)
        if env is not None:
            tol = float(env)
        else:
            tol = DEFAULT_TOL
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    return float(tol)


def _cmd_analyze(args) -> int:
    try:
        q = read_design_csv(args.q_csv)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_BAD_INPUT)
    report = q.analyze()
    if args.paranoid:
        for k in range(q.n_factors):
            expected = intersection_set_bruteforce(q, k)
            if expected != report.intersection_sets[k]:
                return _fail(
                    f"paranoid cross-check failed for column {k + 1}: fast intersection "
                    f"set {sorted(report.intersection_sets[k])} != oracle {sorted(expected)}",
                    EXIT_DOMAIN,
                )
            if report.theta_identifiable[k] != (expected == frozenset({k})):
                return _fail(
                    f"paranoid cross-check failed for column {k + 1}: masking verdict "
                    "disagrees with the oracle intersection",
                    EXIT_DOMAIN,
                )
    if args.format == "json":
        sys.stdout.write(report.to_json() + "\n")
    else:
        lines = ["column,theta_identifiable,a_identifiable,intersection_set"]
        for k in range(q.n_factors):
            a_val = report.a_identifiable[k]
            a_txt = "undefined" if a_val is None else str(a_val).lower()
            inter = ";".join(str(i + 1) for i in sorted(report.intersection_sets[k]))
            lines.append(
                f"{k + 1},{str(report.theta_identifiable[k]).lower()},{a_txt},{inter}"
            )
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_check(args) -> int:
    try:
        tol = _resolve_tol(args)
        model = load_bundle(args.bundle)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_BAD_INPUT)
    report = model.check_assumptions(tol)
    sys.stdout.write(report.to_json() + "\n")
    if args.paranoid and report.overall:
        for k in range(model.n_factors):
            verdict = model.q.a_identifiable(k)
            if verdict is None:
                continue
            witness = a_nonidentifiability_witness(model, k, tol)
            if (witness is not None) != (not verdict):
                return _fail(
                    f"paranoid cross-check failed for column {k + 1}: null-space witness "
                    "disagrees with the masking verdict",
                    EXIT_DOMAIN,
                )
    if not report.overall:
        return _fail("model violates the assumptions (see report)", EXIT_DOMAIN)
    return EXIT_OK


def _cmd_recover(args) -> int:
    try:
        tol = _resolve_tol(args)
        m = read_matrix_csv(args.m_csv)
        q = read_design_csv(args.q_csv)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_BAD_INPUT)
    try:
        result = recover(m, q, tol)
    except ValueError as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    if args.paranoid:
        for pattern, items in sorted(
            q.realized_patterns().items(), key=lambda kv: tuple(sorted(kv[0]))
        ):
            dim = column_space(m[:, list(items)], tol).dim
            if dim != len(pattern):
                return _fail(
                    "paranoid cross-check failed: the block for pattern "
                    f"{sorted(k + 1 for k in pattern)} spans dimension {dim}, expected "
                    f"{len(pattern)}; the data violate the model assumptions",
                    EXIT_DOMAIN,
                )
        for k in range(q.n_factors):
            if not q.support(k):
                continue
            expected = len(q.intersection_set(k))
            if result.subspace_dims[k] != expected:
                return _fail(
                    f"paranoid cross-check failed for column {k + 1}: subspace dimension "
                    f"{result.subspace_dims[k]} != |intersection set| {expected}; the data "
                    "likely violate the model assumptions",
                    EXIT_DOMAIN,
                )
    diagnostics = {
        "skipped": sorted(k + 1 for k in result.skipped),
        "subspace_dims": list(result.subspace_dims),
        "residuals": _jsonable(result.residuals),
    }
    theta_hat = result.theta_hat()
    if args.format == "json":
        payload = {"directions": _jsonable(theta_hat), "loadings": _jsonable(result.loadings)}
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write(format_matrix_csv(theta_hat) + "\n" + format_matrix_csv(result.loadings))
    sys.stderr.write(json.dumps(diagnostics, indent=2) + "\n")
    return EXIT_OK


def _cmd_counterexample(args) -> int:
    try:
        model = load_bundle(args.bundle)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_BAD_INPUT)
    q = model.q
    k = args.column - 1
    if not 0 <= k < q.n_factors:
        return _fail(f"--column {args.column} out of range for K={q.n_factors}", EXIT_DOMAIN)
    try:
        if args.loading:
            partners = [kp for kp in range(q.n_factors) if kp != k and q.masks(kp, k) and q.support(kp)]
            if not partners:
                return _fail(
                    f"loading column {args.column} is identifiable: no usable column masks it",
                    EXIT_DOMAIN,
                )
            alt = a_counterexample(model, k, partners[0], args.eps)
        else:
            partners = [kp for kp in range(q.n_factors) if kp != k and q.masks(k, kp)]
            if not partners:
                return _fail(
                    f"factor column {args.column} is identifiable: it masks no other column",
                    EXIT_DOMAIN,
                )
            alt = theta_counterexample(model, k, partners[0], args.eps)
    except ValueError as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    try:
        tol = _resolve_tol(args)
    except ValueError as exc:
        return _fail(str(exc), EXIT_BAD_INPUT)
    verification = {
        "which": alt.which_theorem,
        "perturbation": {
            "k": alt.perturbation[0] + 1,
            "k_prime": alt.perturbation[1] + 1,
            "epsilon": alt.perturbation[2],
        },
        "recomposition_relative_error": recomposition_error(alt, model),
        "assumptions": alt.model.check_assumptions(tol).to_dict(),
    }
    sys.stdout.write(format_bundle(alt.model) + "\n")
    sys.stderr.write(json.dumps(verification, indent=2) + "\n")
    return EXIT_OK


def _cmd_generate(args) -> int:
    try:
        planted = _parse_plant(args.plant) if args.plant else ()
        policy = args.policy
        if policy is None:
            policy = PLANTED_MASKING if planted else IDENTITY_ANCHORED
        spec = GeneratorSpec(
            n=args.n,
            j=args.j,
            k=args.k,
            seed=args.seed,
            pattern_policy=policy,
            planted=planted,
            entry_scale=args.entry_scale,
        )
    except ValueError as exc:
        return _fail(str(exc), EXIT_BAD_INPUT)
    try:
        q = random_design(spec)
        model = random_model(spec, q)
    except (ValueError, RuntimeError) as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    sys.stdout.write(format_bundle(model) + "\n")
    return EXIT_OK


def _cmd_demo_decay(args) -> int:
    if args.n < 2:
        return _fail("--n must be at least 2", EXIT_DOMAIN)
    ladder = []
    step = 10
    while step < args.n:
        ladder.append(step)
        step *= 10
    ladder = [n for n in ladder if n >= 2] + [args.n]
    lines = ["n,m,sigma_min,frobenius_sq,upper_bound"]
    for n in ladder:
        m = default_split(n)
        stats = decay_stats(n, m)
        lines.append(
            f"{n},{m},{stats.sigma_min!r},{stats.frobenius_sq!r},{stats.upper_bound!r}"
        )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_demo_help(args) -> int:
    print("qident: error: demo requires a subcommand (try: qident demo decay --n 10000)", file=sys.stderr)
    return EXIT_BAD_INPUT


def _parse_plant(text: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(">")
        if len(parts) != 2:
            raise ValueError(f'malformed plant {chunk!r}: expected "masker>masked"')
        try:
            masker, masked = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ValueError(f"malformed plant {chunk!r}: {exc}") from exc
        if masker < 1 or masked < 1:
            raise ValueError(f"plant indices are 1-based, got {chunk!r}")
        pairs.append((masker - 1, masked - 1))
    if not pairs:
        raise ValueError("--plant given but no pairs parsed")
    return tuple(pairs)


def _jsonable(arr: np.ndarray):
    """Nested lists with NaN replaced by None so the output is strict JSON."""
    def convert(value):
        if isinstance(value, list):
            return [convert(v) for v in value]
        if isinstance(value, float) and value != value:
            return None
        return value

    return convert(np.asarray(arr).tolist())


if __name__ == "__main__":
    sys.exit(main())
