"""Command-line entry point for hg-entangle."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from dotenv import load_dotenv
from pydantic import ValidationError

from hg_entangle import __version__
from hg_entangle.exceptions import ExitCode, HGEntangleError, InputError
from hg_entangle.formats import (
    dump_json,
    dump_state,
    load_state,
    qcurve_csv,
    report_document,
    round_float,
    table_csv,
    table_document,
    teleport_document,
    truth_table_document,
    write_csv,
)
from hg_entangle.hom_teleport import check_truth_table, hom_truth_table, teleport
from hg_entangle.models.config import (
    BuildHGConfig,
    CoeffsConfig,
    ConvertConfig,
    EntropyConfig,
    HGEntangleConfig,
    HomConfig,
    LGInputConfig,
    ModeFamily,
    ModesEvalConfig,
    OutputFormat,
    QCurveConfig,
    TeleportConfig,
)
from hg_entangle.models.modes import BeamGeometry, LGIndex, ModeIndex
from hg_entangle.models.spdc import ConservationLaw
from hg_entangle.models.states import TwoPhotonState
from hg_entangle.models.validation import ValidationResult, check_tolerance
from hg_entangle.photon_states import (
    build_hg_entangled_state,
    convert_state,
    flat_lg_coefficients,
    lg_spdc_state,
    schmidt_coefficients,
    schmidt_entropy,
)
from hg_entangle.spdc_overlap import (
    coefficient_table,
    conservation_report,
    gaussian_pump_check,
    mode_match_probabilities,
)
from hg_entangle.transverse_modes import (
    Field2D,
    field_grid,
    hg_field,
    hg_field_waist,
    lg_field_waist,
)

logger = structlog.get_logger(__name__)

PARITY_LIMIT = 1e-10
GAUSSIAN_PUMP_LIMIT = 1e-8
TELEPORT_LIMIT = 1e-12

Handler = Callable[[argparse.Namespace, HGEntangleConfig], int]


def configure_logging(level: str) -> None:
    """Send stdlib and structlog output to stderr; stdout carries payloads only."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.processors.KeyValueRenderer(key_order=["event"]),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8")
    logger.info("Output written", path=out, size=len(text))


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}", path=path) from e


def _finish(result: ValidationResult, command: str) -> int:
    for warning in result.warnings:
        logger.warning("Self-check warning", command=command, detail=warning)
    if result:
        return ExitCode.OK
    for error in result.errors:
        logger.error("Self-check failed", command=command, detail=error)
    return ExitCode.INVARIANT_VIOLATION


def cmd_qcurve(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    if args.a_linspace is not None:
        start, stop, count = args.a_linspace
        if count != int(count) or count < 1:
            raise InputError("linspace count must be a positive integer", count=count)
        a_values = [float(a) for a in np.linspace(start, stop, int(count))]
    else:
        a_values = args.a
    config = QCurveConfig(
        m_values=args.m,
        a_values=a_values,
        n_max=args.n_max if args.n_max is not None else settings.q_tail_terms,
        out=args.out,
    )
    grid = mode_match_probabilities(
        config.m_values, config.a_values, config.n_max, settings.tail_tolerance
    )
    _emit(qcurve_csv(config.m_values, config.a_values, grid), config.out)
    return ExitCode.OK


def cmd_coeffs(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    config = CoeffsConfig(
        pump_m=args.pump[0],
        pump_n=args.pump[1],
        a=args.a,
        max_order=args.max_order,
        max_table_order=settings.max_table_order,
        normalize=args.normalize,
        rule_order=(
            settings.quadrature_order if args.quadrature_order is None else args.quadrature_order
        ),
        format=args.format,
        out=args.out,
    )
    pump = ModeIndex.of(config.pump_m, config.pump_n)
    table = coefficient_table(
        pump,
        config.a,
        config.max_order,
        spec=settings.quadrature_spec(config.rule_order),
        normalize=config.normalize,
        max_table_order=config.max_table_order,
    )
    reports = [conservation_report(table, law) for law in ConservationLaw]

    checks = ValidationResult()
    scale = max((abs(c) for c in table.entries.values()), default=0.0) or 1.0
    parity = next(r for r in reports if r.law is ConservationLaw.PARITY)
    check_tolerance(checks, "parity violation", parity.worst_violation / scale, PARITY_LIMIT)
    if pump.as_tuple() == (0, 0):
        factorized = gaussian_pump_check(table)
        check_tolerance(
            checks,
            "Gaussian pump factorization deviation",
            factorized.max_ratio_deviation,
            GAUSSIAN_PUMP_LIMIT,
        )

    if config.format is OutputFormat.JSON:
        _emit(dump_json(table_document(table, reports)), config.out)
    else:
        _emit(table_csv(table), config.out)
        report_text = dump_json([report_document(report) for report in reports])
        if config.out is None:
            sys.stderr.write(report_text)
        else:
            Path(f"{config.out}.reports.json").write_text(report_text, encoding="utf-8")
    for report in reports:
        logger.info("Conservation report", summary=report.summary())
    return _finish(checks, "coeffs")


def cmd_build_hg(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    config = BuildHGConfig(a=args.a, max_order=args.max_order, out=args.out)
    _emit(dump_state(build_hg_entangled_state(config.a, config.max_order)), config.out)
    return ExitCode.OK


def _coefficient(text: str) -> Tuple[int, complex]:
    """Parse ``l=value`` where value is a Python complex literal such as 0.5+0.1j."""
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected l=value, got {text!r}")
    try:
        return int(key), complex(value.replace(" ", ""))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid coefficient {text!r}") from e


def cmd_lg_input(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    coefficients: Dict[int, complex] = (
        dict(args.coeff) if args.coeff else flat_lg_coefficients(args.l_max)
    )
    config = LGInputConfig(l_max=args.l_max, coefficients=coefficients, out=args.out)
    _emit(dump_state(lg_spdc_state(config.coefficients, config.l_max)), config.out)
    return ExitCode.OK


def cmd_convert(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    config = ConvertConfig(
        input=args.input,
        target=args.to,
        max_block_order=(
            args.max_block_order
            if args.max_block_order is not None
            else settings.max_block_order
        ),
        out=args.out,
    )
    state = load_state(_read_input(config.input))
    converted = convert_state(state, config.target, config.max_block_order)
    _emit(dump_state(converted), config.out)
    return ExitCode.OK


def cmd_entropy(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    config = EntropyConfig(input=args.input, out=args.out)
    state: TwoPhotonState = load_state(_read_input(config.input))
    document = {
        "basis": state.basis.value,
        "schmidt_coefficients": [round_float(s) for s in schmidt_coefficients(state)],
        "entropy_bits": round_float(schmidt_entropy(state)),
    }
    _emit(dump_json(document), config.out)
    return ExitCode.OK


def cmd_hom(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    config = HomConfig(mirror_axis=args.mirror_axis, out=args.out)
    rows = hom_truth_table(config.mirror_axis)
    _emit(dump_json(truth_table_document(rows)), config.out)
    return _finish(check_truth_table(rows, config.mirror_axis), "hom")


def cmd_teleport(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    config = TeleportConfig(
        alpha=args.alpha,
        beta=args.beta,
        polarization=args.polarization,
        mirror_axis=args.mirror_axis,
        out=args.out,
    )
    result = teleport(config.alpha, config.beta, config.polarization, config.mirror_axis)
    _emit(dump_json(teleport_document(result)), config.out)

    checks = ValidationResult()
    check_tolerance(checks, "fidelity defect", 1.0 - result.fidelity, TELEPORT_LIMIT)
    check_tolerance(
        checks, "branch probability drift", abs(result.branch_total() - 1.0), TELEPORT_LIMIT
    )
    return _finish(checks, "teleport")


def _mode_field(config: ModesEvalConfig) -> Field2D:
    first, second = config.index
    if config.family is ModeFamily.LG:
        lg = LGIndex.of(first, second)
        return lambda x, y: lg_field_waist(lg, config.waist, x, y)
    hg = ModeIndex.of(first, second)
    if config.wavenumber is None:
        return lambda x, y: np.asarray(hg_field_waist(hg, config.waist, x, y), dtype=complex)
    geom = BeamGeometry(waist=config.waist, wavenumber=config.wavenumber)
    return lambda x, y: hg_field(hg, geom, x, y, config.z)


def cmd_modes_eval(args: argparse.Namespace, settings: HGEntangleConfig) -> int:
    config = ModesEvalConfig(
        family=args.family,
        index=args.index,
        waist=args.waist,
        extent=args.extent,
        points=args.points,
        z=args.z,
        wavenumber=args.wavenumber,
        out=args.out,
    )
    xs, ys, values = field_grid(_mode_field(config), config.extent, config.points)
    rows = (
        [float(x), float(y), float(v.real), float(v.imag), float(abs(v))]
        for x, y, v in zip(xs, ys, values)
    )
    _emit(write_csv(["x", "y", "re", "im", "abs"], rows), config.out)
    return ExitCode.OK


def _add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="Output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hg-entangle",
        description="Hermite-Gaussian mode entanglement of SPDC photon pairs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    qcurve = commands.add_parser("qcurve", help="Mode-matching probability Q_m versus a")
    qcurve.add_argument("--m", type=int, nargs="+", required=True, help="Mode indices m")
    grid = qcurve.add_mutually_exclusive_group(required=True)
    grid.add_argument("--a", type=float, nargs="+", help="Waist ratios")
    grid.add_argument(
        "--a-linspace",
        type=float,
        nargs=3,
        metavar=("START", "STOP", "N"),
        help="Evenly spaced waist ratios",
    )
    qcurve.add_argument("--n-max", type=int, help="Tail length of the normalizing sum")
    _add_out(qcurve)
    qcurve.set_defaults(handler=cmd_qcurve)

    coeffs = commands.add_parser("coeffs", help="Thin-crystal coefficient table")
    coeffs.add_argument("--pump", type=int, nargs=2, required=True, metavar=("M", "N"))
    coeffs.add_argument("--a", type=float, required=True, help="Waist ratio")
    coeffs.add_argument("--max-order", type=int, required=True)
    coeffs.add_argument("--normalize", action="store_true")
    coeffs.add_argument("--quadrature-order", type=int, help="Gauss-Hermite nodes")
    coeffs.add_argument(
        "--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value
    )
    _add_out(coeffs)
    coeffs.set_defaults(handler=cmd_coeffs)

    state = commands.add_parser("state", help="Build, convert and analyse two-photon states")
    state_commands = state.add_subparsers(dest="state_command", required=True)

    build_hg = state_commands.add_parser("build-hg", help="HG-entangled Gaussian-pump state")
    build_hg.add_argument("--a", type=float, required=True)
    build_hg.add_argument("--max-order", type=int, required=True)
    _add_out(build_hg)
    build_hg.set_defaults(handler=cmd_build_hg)

    lg_input = state_commands.add_parser("lg-input", help="OAM-entangled LG state")
    lg_input.add_argument("--l-max", type=int, required=True)
    lg_input.add_argument(
        "--coeff",
        type=_coefficient,
        action="append",
        metavar="L=VALUE",
        help="Coefficient for LG_0^l LG_0^-l, repeatable (default: flat)",
    )
    _add_out(lg_input)
    lg_input.set_defaults(handler=cmd_lg_input)

    convert = state_commands.add_parser("convert", help="Change basis between HG and LG")
    convert.add_argument("--in", dest="input", required=True, help="State JSON ('-' for stdin)")
    convert.add_argument("--to", choices=["hg", "lg"], required=True)
    convert.add_argument("--max-block-order", type=int)
    _add_out(convert)
    convert.set_defaults(handler=cmd_convert)

    entropy = state_commands.add_parser("entropy", help="Schmidt entropy of a state")
    entropy.add_argument("--in", dest="input", required=True, help="State JSON ('-' for stdin)")
    _add_out(entropy)
    entropy.set_defaults(handler=cmd_entropy)

    hom = commands.add_parser("hom", help="HOM coincidence truth table")
    hom.add_argument("--mirror-axis", choices=["x", "y"], default="y")
    _add_out(hom)
    hom.set_defaults(handler=cmd_hom)

    tele = commands.add_parser("teleport", help="HG-encoded teleportation")
    tele.add_argument("--alpha", type=complex, required=True)
    tele.add_argument("--beta", type=complex, required=True)
    tele.add_argument("--polarization", choices=["sym", "antisym"], default="sym")
    tele.add_argument("--mirror-axis", choices=["x", "y"], default="y")
    _add_out(tele)
    tele.set_defaults(handler=cmd_teleport)

    modes = commands.add_parser("modes-eval", help="Sample an HG or LG field on a grid")
    modes.add_argument("--family", choices=[f.value for f in ModeFamily], default="hg")
    modes.add_argument("--index", type=int, nargs=2, required=True, metavar=("A", "B"))
    modes.add_argument("--waist", type=float, default=1.0)
    modes.add_argument("--extent", type=float, default=3.0, help="Half-width of the grid")
    modes.add_argument("--points", type=int, default=101, help="Samples per axis")
    modes.add_argument("--z", type=float, default=0.0, help="Distance from the waist (HG)")
    modes.add_argument("--wavenumber", type=float, help="Required when z != 0")
    _add_out(modes)
    modes.set_defaults(handler=cmd_modes_eval)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    handler: Handler = args.handler
    try:
        settings = HGEntangleConfig()
        configure_logging(settings.log_level)
        return int(handler(args, settings))
    except HGEntangleError as e:
        logger.error("Command failed", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return int(e.exit_code)
    except ValidationError as e:
        details: List[str] = [
            f"{'.'.join(str(p) for p in err['loc']) or 'input'}: {err['msg']}"
            for err in e.errors()
        ]
        print(f"error: invalid arguments: {'; '.join(details)}", file=sys.stderr)
        return int(ExitCode.INPUT_ERROR)
    except Exception:
        logger.exception("Unexpected failure", command=args.command)
        return int(ExitCode.INTERNAL_ERROR)


if __name__ == "__main__":
    sys.exit(main())
