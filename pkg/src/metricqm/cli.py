"""Command-line entry point: ``metricqm <command> [flags]``.

Exit codes: 0 success (for ``certify``: no signalling found), 1 invalid
metric or failed check, 2 argument/parse errors, 3 signalling witness found.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .dynamics import convexity_defect, evolve_ensemble, named_gate, UnitaryGate
from .errors import MetricQMError, NotHermitian, NotPositiveDefinite
from .io import load_matrix
from .linalg import hermitian_eigen, hermiticity_deviation, as_matrix
from .metric import MetricOperator, diag_metric, verify_axioms
from .protocol import (
    ProtocolConfig,
    certify,
    format_float,
    run_protocol,
    steer,
    sweep_lambda,
    write_sweep_csv,
)
from .states import bell_state, check_trace_condition, ensemble_to_json

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_SIGNALLING = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_metric_source(source: str) -> np.ndarray:
    """``diag:a,b,...`` or a path to a matrix JSON file."""
    if source.startswith("diag:"):
        try:
            values = [float(x) for x in source[5:].split(",")]
        except ValueError:
            raise UsageError(f"bad diagonal metric {source!r}") from None
        return np.diag(np.asarray(values, dtype=np.complex128))
    try:
        return load_matrix(source)
    except (OSError, MetricQMError) as exc:
        raise UsageError(str(exc)) from None


def parse_unitary(source: str) -> UnitaryGate:
    try:
        return named_gate(source)
    except MetricQMError:
        pass
    try:
        return UnitaryGate(load_matrix(source), Path(source).name)
    except (OSError, MetricQMError) as exc:
        raise UsageError(f"cannot load unitary {source!r}: {exc}") from None


def parse_lambdas(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad lambda list {text!r}") from None


def load_metric(source: str) -> MetricOperator:
    try:
        return MetricOperator(parse_metric_source(source))
    except (NotHermitian, NotPositiveDefinite):
        raise
    except MetricQMError as exc:
        raise UsageError(str(exc)) from None


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("METRICQM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"METRICQM_SEED must be an integer, got {env!r}") from None


def _fmt(x: float) -> str:
    return format_float(float(x))


# -- commands -------------------------------------------------------------


def cmd_validate(args, out) -> int:
    raw = parse_metric_source(args.metric)
    try:
        m = as_matrix(raw)
    except MetricQMError as exc:
        raise UsageError(str(exc)) from None
    dev = hermiticity_deviation(m)
    herm = 0.5 * (m + m.conj().T)
    eigenvalues = hermitian_eigen(herm).eigenvalues
    error = None
    try:
        MetricOperator(m)
    except (NotHermitian, NotPositiveDefinite) as exc:
        error = f"{type(exc).__name__}: {exc}"
    report = {
        "hermiticity_deviation": dev,
        "eigenvalues": eigenvalues.tolist(),
        "valid": error is None,
        "error": error,
    }
    if args.format == "json":
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write(f"hermiticity deviation: {_fmt(dev)}\n")
        out.write("eigenvalues: " + ", ".join(_fmt(w) for w in eigenvalues) + "\n")
        out.write(f"verdict: {'valid' if error is None else 'invalid'}\n")
        if error:
            out.write(f"error: {error}\n")
    return EXIT_OK if error is None else EXIT_INVALID


def paper_report(lam: float) -> list[dict]:
    """Computed vs closed-form values for the two-basis Hadamard example."""
    if not lam > 0:
        raise UsageError(f"lambda must be positive, got {lam!r}")
    a = diag_metric(1.0, lam)
    h = named_gate("H")
    shared = bell_state()
    e_z, e_x = steer(shared, "computational"), steer(shared, "diagonal")
    rho_z, rho_x = evolve_ensemble(e_z, h, a), evolve_ensemble(e_x, h, a)
    outcome = run_protocol(ProtocolConfig(a, h))
    probs = outcome.probabilities()
    defect = convexity_defect(e_z, e_x, h, a)

    p_z_exact = 1.0 / (1.0 + lam)
    rho_z_exact = np.eye(2) / (1.0 + lam)
    rho_x_exact = np.diag([0.5, 0.5 / lam])
    gap_exact = abs(1.0 - lam) / (2.0 * (1.0 + lam))
    defect_exact = 0.5 * (abs(p_z_exact - 0.5) + abs(p_z_exact - 0.5 / lam))

    def entry(name, computed, expected):
        c = np.asarray(computed)
        e = np.asarray(expected)
        dev = float(np.max(np.abs(c - e)))
        as_list = (lambda x: x.real.tolist()) if c.ndim else (lambda x: float(np.real(x)))
        return {"quantity": name, "computed": as_list(c), "expected": as_list(e), "deviation": dev}

    rows = [
        {"quantity": "E_Z", "computed": ensemble_to_json(e_z), "expected": "{1/2,|0>; 1/2,|1>}", "deviation": None},
        {"quantity": "E_X", "computed": ensemble_to_json(e_x), "expected": "{1/2,|+>; 1/2,|->}", "deviation": None},
        entry("rho_Z", rho_z.matrix, rho_z_exact),
        entry("rho_X", rho_x.matrix, rho_x_exact),
        entry("P_Z(0)", probs["computational"], p_z_exact),
        entry("P_X(0)", probs["diagonal"], 0.5),
        entry("Tr(A rho_Z)", check_trace_condition(rho_z, a).value, 1.0),
        entry("Tr(A rho_X)", check_trace_condition(rho_x, a).value, 1.0),
        entry("probability_gap", outcome.probability_gap, gap_exact),
        entry("signalling_magnitude", outcome.signalling_magnitude, gap_exact),
        entry("nonlinearity_defect", defect, defect_exact),
    ]
    return rows


def cmd_reproduce_paper(args, out) -> int:
    rows = paper_report(args.lam)
    if args.format == "json":
        out.write(json.dumps({"lambda": args.lam, "rows": rows}, indent=2) + "\n")
        return EXIT_OK
    out.write(f"lambda = {_fmt(args.lam)}, A = diag(1, lambda), U = H, M = |0><0|\n")
    for row in rows:
        if row["deviation"] is None:
            members = "; ".join(
                f"{_fmt(m['weight'])}, {[complex(*z) for z in m['state']['entries']]}"
                for m in row["computed"]["members"]
            )
            out.write(f"{row['quantity']:<22} {{{members}}}   expected {row['expected']}\n")
            continue
        out.write(
            f"{row['quantity']:<22} computed {row['computed']}   expected {row['expected']}"
            f"   |deviation| {row['deviation']:.3e}\n"
        )
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    lambdas = parse_lambdas(args.lambdas)
    if not lambdas:
        raise UsageError("--lambdas needs at least one value")
    if any(not lam > 0 for lam in lambdas):
        raise UsageError("every lambda must be positive")
    rows = sweep_lambda(lambdas, parse_unitary(args.unitary))
    if args.format == "json":
        out.write(json.dumps([row._asdict() for row in rows], indent=2) + "\n")
    else:
        write_sweep_csv(rows, out)
    return EXIT_OK


def cmd_certify(args, out) -> int:
    metric = load_metric(args.metric)
    if metric.dim != 2:
        raise UsageError("certify needs a qubit metric")
    cert = certify(metric, args.trials, resolve_seed(args.seed))
    if args.format == "json":
        out.write(json.dumps(cert.to_json(), indent=2) + "\n")
    else:
        out.write(f"seed: {cert.seed}\ntrials used: {cert.trials_used}\n")
        scale = cert.scalar_multiple
        if scale is not None and scale != 1.0:
            out.write(f"note: metric is {_fmt(scale)} * I (scalar, not identity)\n")
        if cert.found:
            w = cert.witness
            out.write(
                f"signalling witness found at trial {w.trial} ({w.kind})\n"
                f"probability gap: {_fmt(w.probability_gap)}\n"
                f"signalling magnitude: {_fmt(w.signalling_magnitude)}\n"
            )
        else:
            out.write("no signalling witness found\n")
    return EXIT_SIGNALLING if cert.found else EXIT_OK


def cmd_nonlinearity(args, out) -> int:
    metric = load_metric(args.metric)
    if metric.dim != 2:
        raise UsageError("nonlinearity needs a qubit metric")
    u = parse_unitary(args.unitary)
    shared = bell_state()
    defect = convexity_defect(steer(shared, "computational"), steer(shared, "diagonal"), u, metric)
    if args.format == "json":
        out.write(json.dumps({"unitary": u.label, "convexity_defect": defect}, indent=2) + "\n")
    else:
        out.write(f"convexity defect (E_Z vs E_X under {u.label}): {_fmt(defect)}\n")
    return EXIT_OK


def cmd_axioms(args, out) -> int:
    metric = load_metric(args.metric)
    report = verify_axioms(metric, args.trials, resolve_seed(args.seed))
    fields = {
        "conjugate_symmetry_max_violation": report.conjugate_symmetry_max_violation,
        "linearity_max_violation": report.linearity_max_violation,
        "positive_definiteness_min_value": report.positive_definiteness_min_value,
        "samples_used": report.samples_used,
        "seed": report.seed,
        "verdict": report.verdict,
    }
    if args.format == "json":
        out.write(json.dumps(fields, indent=2) + "\n")
    else:
        for k, v in fields.items():
            out.write(f"{k}: {_fmt(v) if isinstance(v, float) else v}\n")
    return EXIT_OK if report.passed else EXIT_INVALID


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metricqm",
        description="Deformed inner products <phi|A|psi> and the signalling they allow.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "text"), default="text")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: $METRICQM_SEED, else 0)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a metric operator")
    p.add_argument("--metric", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reproduce-paper", parents=[common],
                       help="Bell-state example: computed vs closed-form values")
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)
    p.set_defaults(func=cmd_reproduce_paper)

    p = sub.add_parser("sweep", parents=[common], help="protocol over A = diag(1, lambda)")
    p.add_argument("--lambdas", required=True)
    p.add_argument("--unitary", default="H")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("certify", parents=[common], help="search for a signalling witness")
    p.add_argument("--metric", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("nonlinearity", parents=[common],
                       help="convexity defect between the two steered ensembles")
    p.add_argument("--metric", required=True)
    p.add_argument("--unitary", default="H")
    p.set_defaults(func=cmd_nonlinearity)

    p = sub.add_parser("axioms", parents=[common], help="sample the inner-product axioms")
    p.add_argument("--metric", required=True)
    p.add_argument("--trials", type=int, default=1000, help="number of random samples")
    p.set_defaults(func=cmd_axioms)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be positive")
    buffer = io.StringIO()
    try:
        code = args.func(args, buffer)
    except UsageError as exc:
        print(f"metricqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotHermitian, NotPositiveDefinite) as exc:
        print(f"metricqm: invalid metric: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        Path(args.out).write_text(buffer.getvalue())
    else:
        sys.stdout.write(buffer.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
