"""Command-line front end.

Reports go to stdout as JSON, circuits to files (or stdout), logs to stderr.
Exit codes: 0 success, 2 input error, 3 infeasible configuration,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from .circuit import CircuitError, parse_circuit, serialize_circuit
from .compressor import CompressionError, Encoding, PipelineOptions, analyze, full_pipeline
from .estimators import EstimatorError, IonErrorModel, ion_scenarios, photonic_estimate
from .graph import GraphError
from .library import BEST_KNOWN_CPF_COUNTS, LibraryError, cluster_state_circuit, cpf4_barenco_circuit, cz_circuit
from .partition import PartitionError
from .simulator import SimulationError, verify_circuits

log = logging.getLogger("qudit_compress")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _dump(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _read_circuit(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT) from None
    try:
        return parse_circuit(text)
    except CircuitError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _options(args: argparse.Namespace) -> PipelineOptions:
    return PipelineOptions(
        merge=getattr(args, "merge", False),
        absorb_local=getattr(args, "absorb_local", False),
        method=args.method,
        seed=args.seed,
        tol=getattr(args, "tol", 1e-9),
        verify=True,
        dims=getattr(args, "dims", None),
    )


def cmd_analyze(args: argparse.Namespace) -> int:
    c = _read_circuit(args.circuit)
    report = analyze(c, args.k, _options(args))
    sys.stdout.write(_dump(report.to_json()))
    return EXIT_OK


def cmd_compress(args: argparse.Namespace) -> int:
    c = _read_circuit(args.circuit)
    report, out = full_pipeline(c, args.k, _options(args))
    if args.output:
        _write(args.output, serialize_circuit(out))
    sys.stdout.write(_dump(report.to_json()))
    if args.verify:
        if not report.checked:
            log.warning("verification was not performed")
        elif report.max_residual is None or not report.max_residual < args.tol:
            log.error("verification failed: residual %s >= %s", report.max_residual, args.tol)
            return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    original = _read_circuit(args.original)
    compressed = _read_circuit(args.compressed)
    enc_doc = compressed.metadata.get("encoding")
    if enc_doc is None:
        raise CliError(f"{args.compressed}: metadata has no encoding", EXIT_INPUT)
    try:
        enc = Encoding.from_json(enc_doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{args.compressed}: bad encoding metadata: {exc}", EXIT_INPUT) from None
    result = verify_circuits(original, compressed, enc, args.tol)
    sys.stdout.write(_dump({"equal": result.equal, "residual": result.residual, "tol": args.tol}))
    return EXIT_OK if result.equal else EXIT_VERIFY


def cmd_estimate(args: argparse.Namespace) -> int:
    if args.platform == "photonic":
        doc = photonic_estimate(args.d1, args.d2).to_json()
    else:
        model = IonErrorModel(args.base_error, args.embed_factor)
        scenarios = ion_scenarios(args.aux_angles)
        if args.scenario not in scenarios:
            raise CliError(f"unknown scenario {args.scenario!r}; choose from {sorted(scenarios)}", EXIT_INPUT)
        doc = scenarios[args.scenario].to_json(model)
    sys.stdout.write(_dump(doc))
    return EXIT_OK


def cmd_library(args: argparse.Namespace) -> int:
    if args.name == "cpf":
        if args.n == 2:
            c = cz_circuit().circuit
        elif args.n == 4:
            if args.decomposition != "barenco":
                raise CliError(f"unknown decomposition {args.decomposition!r}", EXIT_INPUT)
            c = cpf4_barenco_circuit().circuit
        else:
            known = BEST_KNOWN_CPF_COUNTS.get(args.n)
            hint = f" (best known qubit decomposition uses {known} gates; not constructed)" if known else ""
            raise CliError(f"no two-wire circuit for CPF({args.n}){hint}", EXIT_INFEASIBLE)
    else:
        c = cluster_state_circuit(args.rows, args.cols)
    _write(args.output, serialize_circuit(c))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qudit-compress", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def partition_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("circuit")
        p.add_argument("-k", type=int, required=True, help="number of qudits")
        p.add_argument("--method", choices=("auto", "exact", "heuristic"), default="auto")
        p.add_argument("--exact", dest="method", action="store_const", const="exact")
        p.add_argument("--heuristic", dest="method", action="store_const", const="heuristic")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("analyze", help="interaction graph, best partition and ratio bounds")
    partition_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compress", help="rewrite a qubit circuit onto k qudits")
    partition_flags(p)
    p.add_argument("--merge", action="store_true")
    p.add_argument("--absorb-local", action="store_true")
    p.add_argument("--verify", action="store_true", help="exit 4 if the rewrite does not check out")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--dims", type=_int_list, help="qudit dimensions, e.g. 5,5")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("verify", help="check a compressed circuit against its source")
    p.add_argument("original")
    p.add_argument("compressed")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("estimate", help="hardware cost estimates")
    est = p.add_subparsers(dest="platform", required=True)
    ph = est.add_parser("photonic")
    ph.add_argument("--d1", type=int, required=True)
    ph.add_argument("--d2", type=int, required=True)
    ion = est.add_parser("ion")
    ion.add_argument("--scenario", required=True)
    ion.add_argument("--base-error", type=float, default=0.01)
    ion.add_argument("--embed-factor", type=float, default=2.0)
    ion.add_argument("--aux-angles", type=_float_list, help="five angle multiples for aux-qubit-5")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("library", help="emit benchmark circuits")
    lib = p.add_subparsers(dest="name", required=True)
    cpf = lib.add_parser("cpf")
    cpf.add_argument("--n", type=int, required=True)
    cpf.add_argument("--decomposition", default="barenco")
    cpf.add_argument("-o", "--output")
    cl = lib.add_parser("cluster")
    cl.add_argument("--rows", type=int, required=True)
    cl.add_argument("--cols", type=int, required=True)
    cl.add_argument("-o", "--output")
    p.set_defaults(func=cmd_library)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except (PartitionError, GraphError, CompressionError, LibraryError, EstimatorError, SimulationError) as exc:
        log.error("%s", exc)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
