"""
Cluster gates - drives the gaussian core through the measurement schedules of the
single-mode cluster (I, P, F) and the two-rail CZ cluster, recording every
intermediate error matrix and the per-correction error variances.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Tuple

from gkpthreshold.core.exceptions import require
from gkpthreshold.models.covariance import DELTA, EPSILON, NoiseTerm, SymbolicCovariance
from gkpthreshold.models.schedule import ErrorVariance, Gate, GateSchedule, PropagationTrace
from gkpthreshold.services.gaussian_core import (
    correct_map,
    cz_inject,
    single_mode_step,
    two_mode_step,
)

logger = logging.getLogger(__name__)

_ANCILLA = NoiseTerm(1, 0)  # δ


def standard_eta0(gate) -> SymbolicCovariance:
    """The fixed-point input error matrix: diag(δ, 2δ+ε) per mode."""
    g = Gate.parse(gate)
    p_var = 2 * DELTA + EPSILON
    if g.is_two_mode:
        return SymbolicCovariance.diag(DELTA, DELTA, p_var, p_var)
    return SymbolicCovariance.diag(DELTA, p_var)


def _as_schedule(gate) -> GateSchedule:
    if isinstance(gate, GateSchedule):
        return gate
    return GateSchedule.for_gate(gate)


def _error_variances(step: int, eta: SymbolicCovariance, schedule: GateSchedule) -> List[ErrorVariance]:
    return [
        ErrorVariance(step=step, rail=rail, variance=eta.qq(mode) + _ANCILLA)
        for mode, rail in enumerate(schedule.rails)
    ]


def propagate(
    gate,
    standard_input: bool = True,
    eta0: Optional[SymbolicCovariance] = None,
) -> PropagationTrace:
    """Run one gate's schedule and return every row of its noise-evolution table.

    With ``standard_input`` the trace starts from diag(δ, 2δ+ε) per mode; otherwise
    ``eta0`` must be supplied with the right dimension for the gate.
    """
    schedule = _as_schedule(gate)
    if standard_input:
        require(eta0 is None, "pass either standard_input or eta0, not both")
        eta = standard_eta0(schedule.gate)
    else:
        require(eta0 is not None, "eta0 is required when standard_input is false")
        eta = eta0
    expected_dim = 4 if schedule.gate.is_two_mode else 2
    require(eta.dim == expected_dim, "eta0 dimension does not match the gate", gate=schedule.gate.value, dim=eta.dim)

    rows = {"eta0": eta}
    err_vars: List[ErrorVariance] = []

    if schedule.gate.is_two_mode:
        eta = cz_inject(eta)
        rows["eta0p"] = eta

    for step, m in enumerate(schedule.measurement_vector, start=1):
        if schedule.gate.is_two_mode:
            eta = two_mode_step(eta)
        else:
            eta = single_mode_step(eta, m)
        rows[f"eta{step}"] = eta
        if step in schedule.correction_steps:
            err_vars.extend(_error_variances(step, eta, schedule))
            eta = correct_map(eta)
            rows[f"eta{step}c"] = eta

    logger.debug("propagated %s: eta4c=%s", schedule.gate.value, eta)
    return PropagationTrace(gate=schedule.gate, rows=rows, err_vars=tuple(err_vars))


def error_multipliers(gate) -> Tuple[int, ...]:
    """n_j with σ²_err,j = n_j σ² under δ = ε = σ², ordered by step then rail."""
    return _multipliers(Gate.parse(gate))


@lru_cache(maxsize=None)
def _multipliers(gate: Gate) -> Tuple[int, ...]:
    trace = propagate(gate)
    return tuple(ev.variance.multiple_of_sigma2() for ev in trace.err_vars)


def fixed_point_check(gate) -> bool:
    """True iff the corrected output error matrix equals the standard input exactly."""
    trace = propagate(gate)
    return trace.final == trace.initial
