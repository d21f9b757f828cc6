"""CSV and JSON encodings for tables, curves, states and HOM results.

Floats are written with 12 significant digits in scientific notation for CSV
and rounded to 12 significant digits for JSON, so identical inputs give
byte-identical output.
"""

import csv
import io
import json
from typing import Any, Dict, Iterable, List, Optional, Sequence

from pydantic import ValidationError

from hg_entangle.exceptions import StateFormatError
from hg_entangle.models.hom import TeleportResult, TruthTableRow
from hg_entangle.models.spdc import CoefficientTable, ConservationReport
from hg_entangle.models.states import Basis, PairLabel, TwoPhotonState, label_order
from hg_entangle.models.validation import first_error_path, validate_state_document


def format_float(value: float) -> str:
    """12 significant digits, scientific notation."""
    return f"{float(value) + 0.0:.11e}"


def round_float(value: float) -> float:
    """Round to 12 significant digits for JSON output."""
    return float(format_float(value)) + 0.0


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows as CSV text with LF line endings; floats use ``format_float``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(format_float(v) if isinstance(v, float) else v for v in row)
    return buffer.getvalue()


def dump_json(document: Any) -> str:
    return json.dumps(document, indent=2) + "\n"


def qcurve_csv(m_values: Sequence[int], a_values: Sequence[float], grid: Any) -> str:
    header = ["a"] + [f"Q{m}" for m in m_values]
    rows = ([float(a)] + [float(q) for q in grid[k]] for k, a in enumerate(a_values))
    return write_csv(header, rows)


TABLE_HEADER = ["m_s", "n_s", "m_i", "n_i", "re", "im", "abs"]


def table_rows(table: CoefficientTable) -> List[List[Any]]:
    return [[*key, float(c.real), float(c.imag), float(abs(c))] for key, c in table.rows()]


def table_csv(table: CoefficientTable) -> str:
    return write_csv(TABLE_HEADER, table_rows(table))


def report_document(report: ConservationReport) -> Dict[str, Any]:
    return {
        "law": report.law.value,
        "satisfied_weight": round_float(report.satisfied_weight),
        "worst_violation": round_float(report.worst_violation),
        "satisfied_count": report.satisfied_count,
        "violating_count": report.violating_count,
    }


def table_document(
    table: CoefficientTable, reports: Optional[Sequence[ConservationReport]] = None
) -> Dict[str, Any]:
    document: Dict[str, Any] = {
        "pump": list(table.pump.as_tuple()),
        "a": round_float(table.waist_ratio.value),
        "max_order": table.max_order,
        "normalized": table.normalized,
        "entries": [
            dict(zip(TABLE_HEADER, [*key, *(round_float(v) for v in (c.real, c.imag, abs(c)))]))
            for key, c in table.rows()
        ],
    }
    if reports is not None:
        document["reports"] = [report_document(report) for report in reports]
    return document


def state_to_document(state: TwoPhotonState) -> Dict[str, Any]:
    """Serialize a state with entries sorted by (signal, idler) label."""
    return {
        "basis": state.basis.value,
        "truncation_order": state.truncation_order,
        "entries": [
            {
                "s": list(signal),
                "i": list(idler),
                "re": round_float(c.real),
                "im": round_float(c.imag),
            }
            for (signal, idler), c in state.sorted_items()
        ],
    }


def state_from_document(document: Any) -> TwoPhotonState:
    """Build a state from a decoded document.

    Raises:
        StateFormatError: with the field path of the first problem found
    """
    path = first_error_path(document)
    if path is not None:
        result = validate_state_document(document)
        raise StateFormatError(f"state document does not match schema: {result}", path=path)

    basis = Basis(document["basis"])
    truncation = document["truncation_order"]
    amplitudes: Dict[PairLabel, complex] = {}
    for k, entry in enumerate(document["entries"]):
        signal, idler = tuple(entry["s"]), tuple(entry["i"])
        for field, label in (("s", signal), ("i", idler)):
            if label[0] < 0 or (basis is Basis.HG and label[1] < 0):
                raise StateFormatError(
                    f"invalid {basis.value} label {list(label)}", path=f"entries/{k}/{field}"
                )
            if label_order(basis, label) > truncation:  # type: ignore[arg-type]
                raise StateFormatError(
                    f"label {list(label)} exceeds truncation order {truncation}",
                    path=f"entries/{k}/{field}",
                )
        key = (signal, idler)
        if key in amplitudes:
            raise StateFormatError("duplicate entry", path=f"entries/{k}")
        amplitudes[key] = complex(entry["re"], entry["im"])  # type: ignore[index]
    try:
        return TwoPhotonState(basis=basis, truncation_order=truncation, amplitudes=amplitudes)
    except ValidationError as e:
        raise StateFormatError(f"invalid state: {e.errors()[0]['msg']}", path="entries") from e


def load_state(text: str) -> TwoPhotonState:
    """Parse JSON text into a state, reporting syntax errors by line and column."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFormatError(f"malformed JSON: {e.msg}", line=e.lineno, column=e.colno) from e
    return state_from_document(document)


def dump_state(state: TwoPhotonState) -> str:
    return dump_json(state_to_document(state))


def truth_table_document(rows: Sequence[TruthTableRow]) -> List[Dict[str, Any]]:
    return [
        {
            "axis": row.axis.value,
            "bell_state": row.bell_state.value,
            "pol_symmetry": row.pol_symmetry.value,
            "coincidence_prob": round_float(row.coincidence_prob),
        }
        for row in rows
    ]


def _complex_document(value: complex) -> Dict[str, float]:
    return {"re": round_float(value.real), "im": round_float(value.imag)}


def teleport_document(result: TeleportResult) -> Dict[str, Any]:
    return {
        "branch_probs": {
            kind.value: round_float(p) for kind, p in result.branch_probabilities.items()
        },
        "selected_branch": result.selected_branch.value,
        "output_qubit": [_complex_document(v) for v in result.output_qubit],
        "fidelity": round_float(result.fidelity),
        "success_prob": round_float(result.success_probability),
    }
