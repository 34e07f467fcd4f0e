"""
Output records - turns analysis results into {command, parameters, rows, metadata}
and renders them as JSON or CSV.

Floats are written with ``repr`` (shortest string that round-trips), exact
rationals as "p/q" strings. Metadata never contains wall-clock data unless a
timestamp is explicitly requested.
"""

import csv
import io
import json
import math
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import sympy as sp

from gkpthreshold.core.config import settings
from gkpthreshold.core.exceptions import NumericalFailure
from gkpthreshold.models.covariance import NoiseModel, NoiseTerm
from gkpthreshold.models.records import (
    CurvePoint,
    DistillationResult,
    MCResult,
    OutputRecord,
    ThresholdRow,
)
from gkpthreshold.models.schedule import ROW_LABELS, PropagationTrace

_MATRIX_ROW_STEP = {
    "eta0": 0,
    "eta0p": 0,
    "eta1": 1,
    "eta2": 2,
    "eta3": 3,
    "eta3c": 3,
    "eta4": 4,
    "eta4c": 4,
}


def build_record(
    command: str,
    parameters: Dict[str, Any],
    rows: List[Dict[str, Any]],
    seed: Optional[int] = None,
    stamp: bool = False,
    **extra,
) -> OutputRecord:
    metadata: Dict[str, Any] = {"version": settings.APP_VERSION}
    if seed is not None:
        metadata["seed"] = seed
    metadata.update(extra)
    if stamp:
        metadata["timestamp"] = datetime.now(timezone.utc).isoformat()
    return OutputRecord(command=command, parameters=parameters, rows=rows, metadata=metadata)


# Row builders

def threshold_rows(rows: Iterable[ThresholdRow]) -> List[Dict[str, Any]]:
    return [
        {"p_ft": r.p_ft, "sigma2": r.sigma2, "squeezing_db": r.squeezing_db, "gate": r.gate.value}
        for r in rows
    ]


def curve_rows(points: Iterable[CurvePoint]) -> List[Dict[str, Any]]:
    return [{"squeezing_db": p.squeezing_db, "sigma2": p.sigma2, "p_err": p.p_err} for p in points]


def _rational(x: sp.Rational) -> str:
    return str(sp.Rational(x))


def _term_row(key: str, label: str, step: int, rail, i, j, term: NoiseTerm, noise: Optional[NoiseModel]):
    row = {"row": key, "label": label, "step": step, "rail": rail, "i": i, "j": j}
    if noise is None:
        row.update(delta=_rational(term.delta), epsilon=_rational(term.epsilon), value=str(term))
    else:
        row["value"] = term.at(noise)
    return row


def noise_table_rows(trace: PropagationTrace, noise: Optional[NoiseModel] = None) -> List[Dict[str, Any]]:
    """One row per matrix entry of every trace row, then one per σ²_err.

    Without ``noise`` the entries are exact δ/ε coefficients; with it, numbers.
    """
    out = []
    for key, eta in trace.rows.items():
        for i in range(eta.dim):
            for j in range(eta.dim):
                out.append(
                    _term_row(key, ROW_LABELS[key], _MATRIX_ROW_STEP[key], None, i, j, eta.entry(i, j), noise)
                )
    for ev in trace.err_vars:
        label = f"σ²_err,{ev.step}"
        out.append(_term_row("sigma2_err", label, ev.step, ev.rail, None, None, ev.variance, noise))
    return out


def mc_rows(
    result: MCResult,
    analytic_p_err: float,
    analytic_step_fail: Dict[str, float],
    analytic_eta: np.ndarray,
) -> List[Dict[str, Any]]:
    """Estimate next to the analytic value for p_err, each correction event and each η entry."""
    n = result.samples
    rows = [
        {
            "quantity": "p_err",
            "estimate": result.p_err_hat,
            "std_err": result.std_err,
            "analytic": analytic_p_err,
        }
    ]
    for label, rate in result.per_step_fail_rates.items():
        rows.append(
            {
                "quantity": f"fail_{label}",
                "estimate": rate,
                "std_err": math.sqrt(rate * (1.0 - rate) / n),
                "analytic": analytic_step_fail[label],
            }
        )
    dim = len(result.empirical_eta)
    for i in range(dim):
        for j in range(i, dim):
            rows.append(
                {
                    "quantity": f"eta4c_{i}{j}",
                    "estimate": result.empirical_eta[i][j],
                    "std_err": result.empirical_eta_std_err[i][j],
                    "analytic": float(analytic_eta[i, j]),
                }
            )
    return rows


def distill_rows(result: DistillationResult) -> List[Dict[str, Any]]:
    probs = result.p_even_given
    return [
        {
            "sigma2": result.sigma2,
            "blur_variance": result.blur_variance,
            "envelope_variance": result.envelope_variance,
            "product": result.product,
            "truncation": result.truncation,
            "p0_plus": probs["+"][0],
            "p2_plus": probs["+"][2],
            "p0_minus": probs["-"][0],
            "p2_minus": probs["-"][2],
            "epsilon": result.epsilon,
            "p_even": result.p_even,
            "distillable": result.distillable,
        }
    ]


# Rendering

def _check_finite(value):
    if isinstance(value, float) and not math.isfinite(value):
        raise NumericalFailure("non-finite value in output", {"value": repr(value)})
    return value


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(_check_finite(value))
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"), ensure_ascii=False)
    return str(value)


def to_json(record: OutputRecord) -> str:
    payload = record.model_dump(mode="python")
    for row in payload["rows"]:
        for v in row.values():
            _check_finite(v)
    return json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def to_csv(record: OutputRecord) -> str:
    """Header of column names (first-seen order across rows), one line per row."""
    columns: List[str] = []
    for row in record.rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in record.rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render(record: OutputRecord, fmt: str = "json") -> str:
    if fmt == "csv":
        return to_csv(record)
    return to_json(record)
