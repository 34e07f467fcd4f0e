"""
Threshold - logical error probabilities of the corrected Clifford gates and the
squeezing required to reach a given fault-tolerance threshold.

A correction with total shift variance n·σ² succeeds when the shift lands in
[-√π/2, √π/2]: p_succ = erf(√π / (2·√(2n)·σ)). A gate succeeds only when every
one of its corrections does. Failure probabilities are carried through erfc and
log1p so that tiny p_err values keep full relative precision.
"""

import logging
import math
from typing import List, Sequence

import numpy as np
from scipy import optimize, special

from gkpthreshold.core.config import settings, validate_probability
from gkpthreshold.core.exceptions import ContractViolation, NumericalFailure, require
from gkpthreshold.models.records import CurvePoint, ThresholdRow, db_to_sigma2, sigma2_to_db
from gkpthreshold.models.schedule import Gate
from gkpthreshold.services.cluster_gates import error_multipliers

logger = logging.getLogger(__name__)

# squeezing levels reported by experiments; annotations for the curve only
EXPERIMENTAL_MILESTONES_DB = (12.7, 5.0)

_BRACKET = (1e-6, 1.0)
_MAX_LOG_SIGMA2 = math.log(1e6)


def _erf_argument(n: int, sigma: float) -> float:
    return math.sqrt(math.pi) / (2.0 * math.sqrt(2.0 * n) * sigma)


def p_fail(n: int, sigma: float) -> float:
    """1 - p_succ, computed directly as erfc."""
    require(n >= 1, "multiplier n must be a positive integer", n=n)
    require(sigma >= 0.0, "sigma must be non-negative", sigma=sigma)
    if sigma == 0.0:
        return 0.0
    return float(special.erfc(_erf_argument(n, sigma)))


def p_succ(n: int, sigma: float) -> float:
    """Probability that a correction with σ²_err = n·σ² succeeds. sigma = 0 gives exactly 1."""
    require(n >= 1, "multiplier n must be a positive integer", n=n)
    require(sigma >= 0.0, "sigma must be non-negative", sigma=sigma)
    if sigma == 0.0:
        return 1.0
    return float(special.erf(_erf_argument(n, sigma)))


def _p_err_from_multipliers(multipliers: Sequence[int], sigma2: float) -> float:
    require(sigma2 >= 0.0, "sigma2 must be non-negative", sigma2=sigma2)
    sigma = math.sqrt(sigma2)
    log_success = 0.0
    for n in multipliers:
        log_success += math.log1p(-p_fail(n, sigma))
    return -math.expm1(log_success)


def p_err_gate(gate, sigma2: float) -> float:
    """Probability that at least one correction of ``gate`` fails at δ = ε = σ²."""
    return _p_err_from_multipliers(error_multipliers(Gate.parse(gate)), sigma2)


def p_err_closed_form(sigma2: float) -> float:
    """1 - erf(√π/(2√14 σ))² · erf(√π/(2√10 σ))², written out directly."""
    sigma = math.sqrt(sigma2)
    a = math.sqrt(math.pi) / (2.0 * math.sqrt(14.0) * sigma)
    b = math.sqrt(math.pi) / (2.0 * math.sqrt(10.0) * sigma)
    return -math.expm1(2.0 * math.log1p(-special.erfc(a)) + 2.0 * math.log1p(-special.erfc(b)))


def sigma2_for_threshold(p_ft: float, gate=Gate.CZ) -> ThresholdRow:
    """Largest σ² (smallest squeezing) at which p_err(gate) does not exceed p_ft."""
    if not validate_probability(p_ft):
        raise ContractViolation("p_ft must lie strictly between 0 and 1", {"p_ft": p_ft})
    g = Gate.parse(gate)
    multipliers = error_multipliers(g)

    def excess(log_sigma2: float) -> float:
        return _p_err_from_multipliers(multipliers, math.exp(log_sigma2)) - p_ft

    lo, hi = (math.log(v) for v in _BRACKET)
    while excess(lo) >= 0.0:
        logger.warning("threshold bracket too high for p_ft=%g; lowering to sigma2=%g", p_ft, math.exp(lo - 5.0))
        lo -= 5.0
        if lo < math.log(1e-300):
            raise NumericalFailure("could not bracket the threshold from below", {"p_ft": p_ft})
    while excess(hi) <= 0.0:
        logger.warning("threshold bracket too low for p_ft=%g; raising to sigma2=%g", p_ft, math.exp(hi + 2.0))
        hi += 2.0
        if hi > _MAX_LOG_SIGMA2:
            raise NumericalFailure("could not bracket the threshold from above", {"p_ft": p_ft})

    # relative tolerance on σ² is absolute tolerance on log σ²
    root = optimize.bisect(excess, lo, hi, xtol=settings.ROOT_REL_TOL * 1e-3, rtol=1e-15, maxiter=500)
    sigma2 = math.exp(root)
    row = ThresholdRow(p_ft=p_ft, sigma2=sigma2, squeezing_db=sigma2_to_db(sigma2), gate=g)
    logger.info("p_FT=%g -> sigma2=%.4g (%.3g dB) for gate %s", p_ft, sigma2, row.squeezing_db, g.value)
    return row


def threshold_table(p_fts: Sequence[float] = settings.TABLE_I_PFT, gate=Gate.CZ) -> List[ThresholdRow]:
    return [sigma2_for_threshold(p, gate) for p in p_fts]


def curve(db_min: float, db_max: float, points: int, gate=Gate.CZ) -> List[CurvePoint]:
    """p_err on an evenly spaced dB grid; one point is allowed when db_min == db_max."""
    require(points >= 1, "points must be at least 1", points=points)
    if points == 1:
        require(db_min <= db_max, "db_min must not exceed db_max", db_min=db_min, db_max=db_max)
        grid = np.array([db_min])
    else:
        require(db_min < db_max, "db_min must be below db_max", db_min=db_min, db_max=db_max)
        grid = np.linspace(db_min, db_max, points)
    g = Gate.parse(gate)
    out = []
    for db in grid:
        s2 = db_to_sigma2(float(db))
        out.append(CurvePoint(squeezing_db=float(db), sigma2=s2, p_err=p_err_gate(g, s2)))
    return out
