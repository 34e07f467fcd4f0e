"""Result and configuration records for the numeric analyses."""

import math
from typing import Any, Dict, List, Literal, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, model_validator

from gkpthreshold.core.config import settings
from gkpthreshold.models.schedule import Gate


def sigma2_to_db(sigma2: float) -> float:
    """Squeezing in dB relative to the vacuum variance 1/2."""
    return -10.0 * math.log10(sigma2 / settings.VACUUM_VARIANCE)


def db_to_sigma2(db: float) -> float:
    return settings.VACUUM_VARIANCE * 10.0 ** (-db / 10.0)


class ThresholdRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_ft: float = Field(gt=0.0, lt=1.0)
    sigma2: PositiveFloat
    squeezing_db: float
    gate: Gate = Gate.CZ


class CurvePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    squeezing_db: float
    sigma2: PositiveFloat
    p_err: float = Field(ge=0.0, le=1.0)


class MCConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    gate: Gate
    sigma2: PositiveFloat
    samples: PositiveInt
    seed: int = Field(default=settings.DEFAULT_SEED, ge=0, lt=2**64)
    count_convention: Literal["half_cell", "exact_modular"] = "half_cell"
    chunk_size: PositiveInt = settings.MC_CHUNK_SIZE


class MCResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_err_hat: float = Field(ge=0.0, le=1.0)
    std_err: float
    samples: int
    failures: int
    empirical_eta: List[List[float]]
    empirical_eta_std_err: List[List[float]]
    per_step_fail_rates: Dict[str, float]


class BlurredWigner(NamedTuple):
    """W_Πa(r; τ²) split into its smooth part and the blurred point-mass weight π·G_τ²(r).

    The full value is ``smooth + delta_weight / (8π)``.
    """

    smooth: float
    delta_weight: float

    @property
    def total(self) -> float:
        return self.smooth + self.delta_weight / (8.0 * math.pi)


class DistillationConfig(BaseModel):
    """Variances for the photon-counting overlap sums.

    Unset variances default to the pure-ancilla values: blur 3σ² and Wigner envelope
    1/(4σ²). ``product_override = v`` rescales the blur to 4σ²·v so that
    blur × envelope = v with the envelope left at 1/(4σ²).
    """

    model_config = ConfigDict(frozen=True)

    sigma2: PositiveFloat
    blur_variance: Optional[PositiveFloat] = None
    envelope_variance: Optional[PositiveFloat] = None
    truncation: Optional[PositiveInt] = None
    product_override: Optional[PositiveFloat] = None

    @model_validator(mode="after")
    def _fill_defaults(self):
        envelope = self.envelope_variance
        if envelope is None:
            envelope = 1.0 / (4.0 * self.sigma2)
        blur = self.blur_variance
        if self.product_override is not None:
            if blur is not None:
                raise ValueError("blur_variance and product_override are mutually exclusive")
            blur = 3.0 * self.sigma2 * (self.product_override / 0.75)
        elif blur is None:
            blur = 3.0 * self.sigma2
        object.__setattr__(self, "envelope_variance", envelope)
        object.__setattr__(self, "blur_variance", blur)
        return self

    @property
    def product(self) -> float:
        return self.blur_variance * self.envelope_variance


class DistillationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma2: float
    blur_variance: float
    envelope_variance: float
    truncation: int
    a_norm: Dict[str, float]  # keys "+", "-"
    a_even: Dict[str, Dict[int, float]]  # sign -> {0: A[0|±], 2: A[2|±]}
    p_even_given: Dict[str, Dict[int, float]]  # sign -> {0: P[0|±], 2: P[2|±]}
    epsilon: float = Field(ge=0.0, le=1.0)
    p_even: float = Field(ge=0.0, le=1.0)

    @property
    def product(self) -> float:
        return self.blur_variance * self.envelope_variance

    @property
    def distillable(self) -> bool:
        return self.epsilon < settings.DISTILLATION_THRESHOLD


class OutputRecord(BaseModel):
    """What every CLI command writes: {command, parameters, rows, metadata}."""

    command: str
    parameters: Dict[str, Any]
    rows: List[Dict[str, Any]]
    metadata: Dict[str, Any]
