"""Model package exports."""

from gkpthreshold.models.covariance import (
    DELTA,
    EPSILON,
    NoiseModel,
    NoiseTerm,
    SymbolicCovariance,
    SymplecticMap,
    symplectic_form,
)
from gkpthreshold.models.schedule import Gate, GateSchedule, ErrorVariance, PropagationTrace
from gkpthreshold.models.records import (
    ThresholdRow,
    CurvePoint,
    MCConfig,
    MCResult,
    BlurredWigner,
    DistillationConfig,
    DistillationResult,
    OutputRecord,
    db_to_sigma2,
    sigma2_to_db,
)

__all__ = [
    'DELTA',
    'EPSILON',
    'NoiseModel',
    'NoiseTerm',
    'SymbolicCovariance',
    'SymplecticMap',
    'symplectic_form',
    'Gate',
    'GateSchedule',
    'ErrorVariance',
    'PropagationTrace',
    'ThresholdRow',
    'CurvePoint',
    'MCConfig',
    'MCResult',
    'BlurredWigner',
    'DistillationConfig',
    'DistillationResult',
    'OutputRecord',
    'db_to_sigma2',
    'sigma2_to_db',
]
