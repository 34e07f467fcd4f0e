"""Gate schedules and propagation traces for the single-mode and two-rail clusters."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

from gkpthreshold.core.config import validate_gate
from gkpthreshold.core.exceptions import ContractViolation
from gkpthreshold.models.covariance import NoiseTerm, SymbolicCovariance


class Gate(str, Enum):
    I = "i"
    P = "p"
    F = "f"
    CZ = "cz"

    @classmethod
    def parse(cls, name) -> "Gate":
        if isinstance(name, cls):
            return name
        if not validate_gate(str(name)):
            raise ContractViolation(f"unknown gate {name!r}", {"gate": name, "allowed": [g.value for g in cls]})
        return cls(str(name).lower())

    @property
    def is_two_mode(self) -> bool:
        return self is Gate.CZ


# measurement vectors on the single-mode cluster; CZ uses p measurements only
MEASUREMENT_VECTORS: Dict[Gate, Tuple[int, ...]] = {
    Gate.I: (0, 0, 0, 0),
    Gate.F: (1, 1, 1, 0),
    Gate.P: (1, 0, 0, 0),
    Gate.CZ: (0, 0, 0, 0),
}

CORRECTION_STEPS: Tuple[int, ...] = (3, 4)


@dataclass(frozen=True)
class GateSchedule:
    gate: Gate
    measurement_vector: Tuple[int, ...]
    correction_steps: Tuple[int, ...] = CORRECTION_STEPS

    @classmethod
    def for_gate(cls, gate) -> "GateSchedule":
        g = Gate.parse(gate)
        return cls(gate=g, measurement_vector=MEASUREMENT_VECTORS[g])

    @property
    def rails(self) -> Tuple[str, ...]:
        return ("top", "bottom") if self.gate.is_two_mode else ("single",)


@dataclass(frozen=True)
class ErrorVariance:
    """σ²_err at one correction: the corrected q variance plus the ancilla variance."""

    step: int
    rail: str
    variance: NoiseTerm


@dataclass(frozen=True)
class PropagationTrace:
    gate: Gate
    rows: Dict[str, SymbolicCovariance] = field(default_factory=dict)
    err_vars: Tuple[ErrorVariance, ...] = ()

    @property
    def initial(self) -> SymbolicCovariance:
        return self.rows["eta0"]

    @property
    def final(self) -> SymbolicCovariance:
        return self.rows["eta4c"]


# Row labels in Table order, with display names
ROW_LABELS: Dict[str, str] = {
    "eta0": "η₀",
    "eta0p": "η₀′",
    "eta1": "η₁",
    "eta2": "η₂",
    "eta3": "η₃",
    "eta3c": "η₃,c",
    "eta4": "η₄",
    "eta4c": "η₄,c",
}
