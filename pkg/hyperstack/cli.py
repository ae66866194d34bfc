import argparse
import json
import logging
import sys
from typing import Any, Callable, Optional

from pydantic import ValidationError

from hyperstack.canonical import to_canonical_json, to_jsonable
from hyperstack.cohomology import (
    a1_separating_decomposition,
    canonical_base_locus,
    classify_genus1,
    evaluation_surjective,
    exist_decomposition,
    h0_h1,
    hom_omega_dimensions,
    unramifiedness_certificate,
)
from hyperstack.cover import build_cover, euler_characteristic, extract_cover_data, validate_cover_data
from hyperstack.curve_graph import arithmetic_genus, is_connected, is_stable
from hyperstack.enumerator import enumerate_strata
from hyperstack.exceptions import HyperstackError, NotHyperellipticError
from hyperstack.involution import find_hyperelliptic_involutions, quotient, validate_involution
from hyperstack.models import (
    CheckResult,
    CheckStatus,
    CoverData,
    CurveGraph,
    DecoratedInvolution,
    EnumerationQuery,
    EnumerationSide,
    TreeBundle,
    ValidationReport,
)

logger = logging.getLogger("CLI")

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class InputDocumentError(ValueError):
    """The input document lacks a key the subcommand needs or holds a malformed value."""


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


# Input documents

def _unwrap(doc: dict, key: str) -> Any:
    return doc[key] if isinstance(doc, dict) and key in doc else doc


def _require(doc: dict, key: str) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        raise InputDocumentError(f"Input document needs a '{key}' entry")
    return doc[key]


def _graph(doc: dict) -> CurveGraph:
    return CurveGraph.model_validate(_unwrap(doc, "graph"))


def _involution(doc: dict) -> Optional[DecoratedInvolution]:
    if isinstance(doc, dict) and "involution" in doc:
        return DecoratedInvolution.model_validate(doc["involution"])
    return None


def _some_involution(doc: dict, graph: CurveGraph) -> DecoratedInvolution:
    inv = _involution(doc)
    if inv is not None:
        return inv
    found = find_hyperelliptic_involutions(graph)
    if not found:
        raise NotHyperellipticError("The curve admits no hyperelliptic involution")
    return found[0]


def _cover(doc: dict) -> CoverData:
    return CoverData.model_validate(_unwrap(doc, "cover"))


def _option(doc: dict, key: str, given: Optional[int]) -> Optional[int]:
    if given is not None:
        return given
    if isinstance(doc, dict) and key in doc:
        value = doc[key]
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise InputDocumentError(f"'{key}' must be an integer, got {value!r}")
        try:
            return int(value)
        except ValueError:
            raise InputDocumentError(f"'{key}' must be an integer, got {value!r}") from None
    return None


# Subcommands. Each returns the payload and the exit status.

Result = tuple[Any, int]


def _report(report: ValidationReport) -> Result:
    return report, 0 if report.valid else 1


def cmd_validate_graph(doc: dict, args: argparse.Namespace) -> Result:
    graph = _graph(doc)
    connected = is_connected(graph)
    checks = [CheckResult(
        check_name="Connectivity",
        status=CheckStatus.PASS if connected else CheckStatus.FAIL,
        message="The dual graph is connected." if connected else "The dual graph is disconnected.",
    )]
    inv = _involution(doc)
    if inv is not None:
        checks += validate_involution(graph, inv).checks
    return _report(ValidationReport.from_checks(checks))


def cmd_genus(doc: dict, args: argparse.Namespace) -> Result:
    return {"genus": arithmetic_genus(_graph(doc))}, 0


def cmd_stability(doc: dict, args: argparse.Namespace) -> Result:
    graph = _graph(doc)
    r_max = _option(doc, "r_max", args.r)
    if r_max is None:
        r_max = 2 * arithmetic_genus(graph) + 1
    return _report(is_stable(graph, r_max))


def cmd_involutions(doc: dict, args: argparse.Namespace) -> Result:
    return {"involutions": find_hyperelliptic_involutions(_graph(doc))}, 0


def cmd_quotient(doc: dict, args: argparse.Namespace) -> Result:
    graph = _graph(doc)
    inv = DecoratedInvolution.model_validate(_require(doc, "involution"))
    return quotient(graph, inv), 0


def cmd_to_cover(doc: dict, args: argparse.Namespace) -> Result:
    graph = _graph(doc)
    return extract_cover_data(graph, _some_involution(doc, graph)), 0


def cmd_from_cover(doc: dict, args: argparse.Namespace) -> Result:
    data = _cover(doc)
    r = _option(doc, "r", args.r)
    if r is None:
        r = 2 * -euler_characteristic(data) + 1
    return build_cover(data, r), 0


def cmd_validate_cover(doc: dict, args: argparse.Namespace) -> Result:
    data = _cover(doc)
    genus = _option(doc, "genus", args.genus)
    if genus is None:
        genus = -euler_characteristic(data)
    r = _option(doc, "r", args.r)
    if r is None:
        r = 2 * genus + 1
    return _report(validate_cover_data(data, genus, r))


def cmd_cohomology(doc: dict, args: argparse.Namespace) -> Result:
    bundle = TreeBundle.model_validate(_unwrap(doc, "bundle"))
    payload = h0_h1(bundle).model_dump(mode="json")
    payload["evaluation_surjective"] = {c: evaluation_surjective(bundle, c) for c in bundle.components}
    return payload, 0


def cmd_decompose(doc: dict, args: argparse.Namespace) -> Result:
    graph = _graph(doc)
    if args.kind == "exist":
        inv = _some_involution(doc, graph)
        return exist_decomposition(graph, inv, _require(doc, "gamma1"), _require(doc, "gamma2")), 0
    return a1_separating_decomposition(graph), 0


def cmd_base_locus(doc: dict, args: argparse.Namespace) -> Result:
    return {"base_locus": canonical_base_locus(_graph(doc))}, 0


def cmd_genus1_classify(doc: dict, args: argparse.Namespace) -> Result:
    graph = _graph(doc)
    p1 = _require(doc, "p1")
    # a missing p2 means the 1-pointed curve
    return {"case": classify_genus1(graph, p1, doc.get("p2", p1))}, 0


def cmd_deformation(doc: dict, args: argparse.Namespace) -> Result:
    graph = _graph(doc)
    inv = _some_involution(doc, graph)
    return {
        "hom": hom_omega_dimensions(graph, inv),
        "audit": unramifiedness_certificate(graph, inv),
    }, 0


def cmd_enumerate(doc: dict, args: argparse.Namespace) -> Result:
    genus = _option(doc, "genus", args.genus)
    if genus is None:
        raise InputDocumentError("enumerate needs --genus")
    r_max = _option(doc, "r_max", args.r)
    query = EnumerationQuery(
        genus=genus,
        r_max=2 * genus + 1 if r_max is None else r_max,
        side=EnumerationSide(args.side),
    )
    return enumerate_strata(query), 0


COMMANDS: dict[str, Callable[[dict, argparse.Namespace], Result]] = {
    "validate-graph": cmd_validate_graph,
    "genus": cmd_genus,
    "stability": cmd_stability,
    "involutions": cmd_involutions,
    "quotient": cmd_quotient,
    "to-cover": cmd_to_cover,
    "from-cover": cmd_from_cover,
    "validate-cover": cmd_validate_cover,
    "cohomology": cmd_cohomology,
    "decompose": cmd_decompose,
    "base-locus": cmd_base_locus,
    "genus1-classify": cmd_genus1_classify,
    "deformation": cmd_deformation,
    "enumerate": cmd_enumerate,
}

# Subcommands that take all their input from options.
NO_INPUT = {"enumerate"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperstack",
        description="Hyperelliptic A_r-stable curves as dual graphs and as cyclic double covers.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="Operation to run")
    parser.add_argument("--input", help="JSON input file (standard input when omitted)")
    parser.add_argument("--genus", type=int, help="Arithmetic genus")
    parser.add_argument("--r", type=int, help="Largest singularity index r")
    parser.add_argument("--side", choices=[s.value for s in EnumerationSide], default="both")
    parser.add_argument("--kind", choices=["a1", "exist"], default="a1", help="Decomposition kind")
    parser.add_argument("--pretty", action="store_true", help="Indented output instead of canonical JSON")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on standard error")
    return parser


def _read_document(args: argparse.Namespace) -> dict:
    if args.command in NO_INPUT and args.input is None:
        return {}
    if args.input:
        with open(args.input, encoding="utf-8") as handle:
            return json.load(handle)
    return json.loads(sys.stdin.read())


def _emit(payload: Any, pretty: bool) -> None:
    if pretty:
        sys.stdout.write(json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(to_canonical_json(payload) + "\n")


def _error(exc: Exception) -> dict:
    return {"error": type(exc).__name__, "message": str(exc), "reasons": list(getattr(exc, "reasons", []))}


def run_command(argv: list[str]) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    configure_logging(args.verbose)

    try:
        doc = _read_document(args)
        payload, status = COMMANDS[args.command](doc, args)
    except (json.JSONDecodeError, ValidationError, InputDocumentError, OSError) as exc:
        logger.error(f"{args.command}: malformed input: {exc}")
        _emit(_error(exc), args.pretty)
        return 2
    except HyperstackError as exc:
        logger.error(f"{args.command}: {exc}")
        _emit(_error(exc), args.pretty)
        return 1

    if isinstance(payload, ValidationReport):
        payload = {**payload.model_dump(mode="json"), "reasons": payload.reasons}
    _emit(payload, args.pretty)
    logger.info(f"{args.command} finished with status {status}")
    return status


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
