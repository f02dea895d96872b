"""
Witness Records and Reports

Pydantic models for per-witness verdicts and the aggregated report, plus
the helpers that turn margin series into verdicts.
"""

from typing import Any, Dict, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

WITNESS_ORDER = (
    "volume",
    "eigen_moduli",
    "f_monotone",
    "ew_functional",
    "blp",
    "hs_norm",
    "body_containment",
    "cp_divisibility",
)

# Witnesses whose violation rules out P-divisibility
P_LEVEL = {
    "volume": "volume",
    "eigen_moduli": "eigenvalue moduli",
    "f_monotone": "f(t)",
    "hs_norm": "Hilbert-Schmidt norm",
    "body_containment": "body containment",
    "ew_functional": "entanglement-witness functional",
}

CP_LEVEL = {
    "cp_divisibility": "conditional complete positivity",
}

NO_DETECTION = "no non-Markovianity detected by implemented witnesses"
CP_ONLY = "CP-indivisible, P-divisibility evidence intact"


class ViolationInterval(BaseModel):
    """Grid-aligned interval [start, end] over which a witness is violated"""
    model_config = ConfigDict(extra="forbid")

    start: float
    end: float


class WitnessRecord(BaseModel):
    """Result of one witness over a trajectory"""
    model_config = ConfigDict(extra="forbid")

    name: str
    applicable: bool
    reason: Optional[str] = Field(None, description="Why the witness is inapplicable")
    verdict: Optional[Literal["monotone", "violated"]] = None
    first_violation_time: Optional[float] = None
    worst_margin: Optional[float] = Field(None, description="Positive iff violated")
    violation_intervals: List[ViolationInterval] = Field(default_factory=list)
    undefined_times: List[float] = Field(default_factory=list)
    series_label: Optional[str] = None
    series: List[Optional[float]] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.applicable and self.verdict == "violated"


class WitnessSummary(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cp_divisible: Optional[bool] = None
    p_divisibility_evidence: Optional[bool] = None
    essentially_non_markovian_evidence: bool = False
    messages: List[str] = Field(default_factory=list)


class WitnessReport(BaseModel):
    """All witness records for one scenario, in a fixed order"""
    model_config = ConfigDict(extra="forbid")

    scenario: str
    family: str
    dim: int
    route: str
    seed: Optional[int] = None
    records: List[WitnessRecord]
    summary: WitnessSummary

    @property
    def any_violation(self) -> bool:
        return any(r.violated for r in self.records)

    def record(self, name: str) -> WitnessRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def inapplicable(name: str, reason: str) -> WitnessRecord:
    return WitnessRecord(name=name, applicable=False, reason=reason)


def _series(values: Optional[np.ndarray]) -> List[Optional[float]]:
    if values is None:
        return []
    return [None if not np.isfinite(v) else float(v) for v in np.asarray(values, dtype=float)]


def record_from_margins(
    name: str,
    starts: np.ndarray,
    ends: np.ndarray,
    margins: np.ndarray,
    series: Optional[np.ndarray] = None,
    series_label: Optional[str] = None,
    undefined_times: Sequence[float] = (),
    details: Optional[Dict[str, Any]] = None,
) -> WitnessRecord:
    """
    Build a record from per-entry margins (positive = violated, NaN = undefined).

    Entry i covers [starts[i], ends[i]]; consecutive violated entries merge
    into one interval.
    """
    margins = np.asarray(margins, dtype=float)
    defined = np.isfinite(margins)
    violated = defined & (margins > 0.0)

    intervals = []
    run_start = None
    for i, flag in enumerate(violated):
        if flag and run_start is None:
            run_start = i
        if run_start is not None and (not flag or i == len(violated) - 1):
            last = i if flag else i - 1
            intervals.append(ViolationInterval(start=float(starts[run_start]), end=float(ends[last])))
            run_start = None

    worst = float(np.max(margins[defined])) if defined.any() else None
    first = float(starts[np.argmax(violated)]) if violated.any() else None
    return WitnessRecord(
        name=name,
        applicable=True,
        verdict="violated" if violated.any() else "monotone",
        first_violation_time=first,
        worst_margin=worst,
        violation_intervals=intervals,
        undefined_times=[float(t) for t in undefined_times],
        series_label=series_label,
        series=_series(series),
        details=details or {},
    )


def monotone_record(
    name: str,
    times: np.ndarray,
    values: np.ndarray,
    tol: float,
    series: Optional[np.ndarray] = None,
    series_label: Optional[str] = None,
    details: Optional[Dict[str, Any]] = None,
) -> WitnessRecord:
    """
    Non-increase check on one or more monitored series, shape (n,) or (n, k).

    A step t_i -> t_{i+1} is violated when some component grows by more than
    tol * max(1, max |values|); it is reported at its start time t_i.
    Steps touching a non-finite value are undefined.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    finite = np.isfinite(values)
    scale = max(1.0, float(np.max(np.abs(values[finite])))) if finite.any() else 1.0
    threshold = tol * scale

    with np.errstate(invalid="ignore"):
        increments = np.diff(values, axis=0)
    step_ok = np.all(finite[1:] & finite[:-1], axis=1)
    margins = np.where(step_ok, np.nanmax(np.where(np.isfinite(increments), increments, -np.inf), axis=1) - threshold,
                       np.nan)

    undefined = times[~np.all(finite, axis=1)]
    if series is None:
        if values.shape[1] == 1:
            series = values[:, 0]
        else:
            series = np.concatenate([[0.0], margins + threshold])
    return record_from_margins(
        name, times[:-1], times[1:], margins,
        series=series, series_label=series_label,
        undefined_times=undefined, details=details,
    )


def pointwise_record(
    name: str,
    times: np.ndarray,
    values: np.ndarray,
    tol: float,
    series_label: Optional[str] = None,
    details: Optional[Dict[str, Any]] = None,
) -> WitnessRecord:
    """Violation wherever a scalar exceeds tol (NaN = undefined)"""
    values = np.asarray(values, dtype=float)
    margins = values - tol
    undefined = times[~np.isfinite(values)]
    return record_from_margins(
        name, times, times, margins,
        series=values, series_label=series_label,
        undefined_times=undefined, details=details,
    )


def _sorted_records(records: Sequence[WitnessRecord]) -> List[WitnessRecord]:
    order = {name: i for i, name in enumerate(WITNESS_ORDER)}
    return sorted(records, key=lambda r: (order.get(r.name, len(order)), r.name))


def aggregate(
    records: Sequence[WitnessRecord],
    scenario: str,
    family: str,
    dim: int,
    route: str,
    seed: Optional[int] = None,
) -> WitnessReport:
    """
    Deterministic merge of witness records.

    Summary flags only use applicable witnesses: P-level witnesses (the
    functional and BLP of order 1 included) bear on P-divisibility, the CCP
    test on CP-divisibility, BLP of order k >= 2 on k-divisibility.
    """
    records = _sorted_records(records)
    applicable = [r for r in records if r.applicable]

    p_violations = []
    cp_violations = []
    messages = []
    for r in applicable:
        if not r.violated:
            continue
        if r.name in P_LEVEL:
            p_violations.append(P_LEVEL[r.name])
        elif r.name == "blp":
            order = r.details.get("order", 1)
            if order == 1:
                p_violations.append("trace distance")
            else:
                cp_violations.append(f"{order}-positivity")
        elif r.name in CP_LEVEL:
            cp_violations.append(CP_LEVEL[r.name])

    cp_record = next((r for r in applicable if r.name == "cp_divisibility"), None)
    cp_divisible = None if cp_record is None else not cp_record.violated
    p_checked = any(
        r.name in P_LEVEL or (r.name == "blp" and r.details.get("order", 1) == 1)
        for r in applicable
    )

    if not p_violations and not cp_violations:
        messages.append(NO_DETECTION)
    if cp_violations and not p_violations:
        messages.append(CP_ONLY)
    for label in cp_violations:
        if label.endswith("-positivity"):
            messages.append(f"k-divisibility violated ({label})")
        else:
            messages.append(f"CP-divisibility violated ({label})")
    for label in p_violations:
        messages.append(f"P-divisibility violated ({label})")

    summary = WitnessSummary(
        cp_divisible=cp_divisible,
        p_divisibility_evidence=(not p_violations) if p_checked else None,
        essentially_non_markovian_evidence=bool(p_violations),
        messages=messages,
    )
    return WitnessReport(
        scenario=scenario,
        family=family,
        dim=dim,
        route=route,
        seed=seed,
        records=records,
        summary=summary,
    )
