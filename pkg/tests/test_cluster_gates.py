import pytest

from gkpthreshold.core.exceptions import ContractViolation
from gkpthreshold.models.covariance import DELTA as d, EPSILON as e
from gkpthreshold.models.covariance import NoiseTerm, SymbolicCovariance
from gkpthreshold.models.schedule import Gate, GateSchedule
from gkpthreshold.services.cluster_gates import (
    error_multipliers,
    fixed_point_check,
    propagate,
    standard_eta0,
)


def M(rows):
    return SymbolicCovariance.from_expr(rows)


def D(*terms):
    return SymbolicCovariance.diag(*terms)


# Noise-evolution columns, one dict per gate
SINGLE_MODE_COLUMNS = {
    Gate.I: {
        "eta0": D(d, 2 * d + e),
        "eta1": D(2 * d + e, d + e),
        "eta2": D(d + e, 2 * d + 2 * e),
        "eta3": D(2 * d + 2 * e, d + 2 * e),
        "eta3c": D(d, 2 * d + 2 * e),
        "eta4": D(2 * d + 2 * e, d + e),
        "eta4c": D(d, 2 * d + e),
    },
    Gate.P: {
        "eta0": D(d, 2 * d + e),
        "eta1": M([[3 * d + e, -d], [-d, d + e]]),
        "eta2": M([[d + e, d], [d, 3 * d + 2 * e]]),
        "eta3": M([[3 * d + 2 * e, -d], [-d, d + 2 * e]]),
        "eta3c": D(d, 2 * d + 2 * e),
        "eta4": D(2 * d + 2 * e, d + e),
        "eta4c": D(d, 2 * d + e),
    },
    Gate.F: {
        "eta0": D(d, 2 * d + e),
        "eta1": M([[3 * d + e, -d], [-d, d + e]]),
        "eta2": M([[2 * d + 2 * e, -2 * d - e], [-2 * d - e, 3 * d + 2 * e]]),
        "eta3": M([[d + 2 * e, -e], [-e, 2 * d + 3 * e]]),
        "eta3c": D(d, 3 * d + 3 * e),
        "eta4": D(3 * d + 3 * e, d + e),
        "eta4c": D(d, 2 * d + e),
    },
}

CZ_COLUMN = {
    "eta0": D(d, d, 2 * d + e, 2 * d + e),
    "eta0p": M(
        [
            [d, 0, 0, -d],
            [0, d, -d, 0],
            [0, -d, 3 * d + 2 * e, 0],
            [-d, 0, 0, 3 * d + 2 * e],
        ]
    ),
    "eta1": M(
        [
            [3 * d + 2 * e, 0, 0, d],
            [0, 3 * d + 2 * e, d, 0],
            [0, d, d + e, 0],
            [d, 0, 0, d + e],
        ]
    ),
    "eta2": M(
        [
            [d + e, 0, 0, -d],
            [0, d + e, -d, 0],
            [0, -d, 3 * d + 3 * e, 0],
            [-d, 0, 0, 3 * d + 3 * e],
        ]
    ),
    "eta3": M(
        [
            [3 * d + 3 * e, 0, 0, d],
            [0, 3 * d + 3 * e, d, 0],
            [0, d, d + 2 * e, 0],
            [d, 0, 0, d + 2 * e],
        ]
    ),
    "eta3c": D(d, d, 2 * d + 2 * e, 2 * d + 2 * e),
    "eta4": D(2 * d + 2 * e, 2 * d + 2 * e, d + e, d + e),
    "eta4c": D(d, d, 2 * d + e, 2 * d + e),
}

ERR_VARS = {
    Gate.I: [(3, "single", NoiseTerm(3, 2)), (4, "single", NoiseTerm(3, 2))],
    Gate.P: [(3, "single", NoiseTerm(4, 2)), (4, "single", NoiseTerm(3, 2))],
    Gate.F: [(3, "single", NoiseTerm(2, 2)), (4, "single", NoiseTerm(4, 3))],
    Gate.CZ: [
        (3, "top", NoiseTerm(4, 3)),
        (3, "bottom", NoiseTerm(4, 3)),
        (4, "top", NoiseTerm(3, 2)),
        (4, "bottom", NoiseTerm(3, 2)),
    ],
}


@pytest.mark.parametrize("gate", [Gate.I, Gate.P, Gate.F])
def test_single_mode_columns(gate):
    trace = propagate(gate)
    expected = SINGLE_MODE_COLUMNS[gate]
    assert list(trace.rows) == list(expected)
    for key, eta in expected.items():
        assert trace.rows[key] == eta, key


def test_cz_column():
    trace = propagate("cz")
    assert list(trace.rows) == list(CZ_COLUMN)
    for key, eta in CZ_COLUMN.items():
        assert trace.rows[key] == eta, key


@pytest.mark.parametrize("gate", list(Gate))
def test_error_variances(gate):
    trace = propagate(gate)
    got = [(ev.step, ev.rail, ev.variance) for ev in trace.err_vars]
    assert got == ERR_VARS[gate]


def test_error_multipliers():
    assert error_multipliers("i") == (5, 5)
    assert error_multipliers("p") == (6, 5)
    assert error_multipliers("f") == (4, 7)
    assert error_multipliers("cz") == (7, 7, 5, 5)


@pytest.mark.parametrize("gate", list(Gate))
def test_fixed_point(gate):
    assert fixed_point_check(gate)
    trace = propagate(gate)
    assert trace.final == standard_eta0(gate)


def test_cz_output_is_two_single_mode_copies():
    single = standard_eta0(Gate.I)
    final = propagate(Gate.CZ).final
    for mode in (0, 1):
        assert final.entry(mode, mode) == single.entry(0, 0)
        assert final.entry(mode + 2, mode + 2) == single.entry(1, 1)


def test_cz_has_no_cross_rail_position_correlation():
    final = propagate(Gate.CZ).final
    assert final.entry(0, 1) == NoiseTerm(0, 0)
    assert final.entry(1, 0) == NoiseTerm(0, 0)


def test_cz_is_noisiest_gate():
    worst = {g: max(error_multipliers(g)) for g in Gate}
    assert worst[Gate.CZ] >= max(worst.values())
    assert sum(error_multipliers(Gate.CZ)) > max(sum(error_multipliers(g)) for g in (Gate.I, Gate.P, Gate.F))


def test_schedules():
    assert GateSchedule.for_gate("I").measurement_vector == (0, 0, 0, 0)
    assert GateSchedule.for_gate("F").measurement_vector == (1, 1, 1, 0)
    assert GateSchedule.for_gate("P").measurement_vector == (1, 0, 0, 0)
    assert all(GateSchedule.for_gate(g).correction_steps == (3, 4) for g in Gate)


def test_unknown_gate():
    with pytest.raises(ContractViolation):
        propagate("t")


def test_custom_input_matrix():
    eta0 = D(2 * d, 2 * d + e)
    trace = propagate("i", standard_input=False, eta0=eta0)
    assert trace.initial == eta0
    # corrections wipe out the larger initial position noise
    assert trace.final == standard_eta0("i")


def test_custom_input_dimension_checked():
    with pytest.raises(ContractViolation):
        propagate("cz", standard_input=False, eta0=standard_eta0("i"))
    with pytest.raises(ContractViolation):
        propagate("i", standard_input=False)


def test_error_multipliers_are_cached_per_gate(monkeypatch):
    from gkpthreshold.services import cluster_gates

    first = error_multipliers("cz")
    monkeypatch.setattr(cluster_gates, "propagate", lambda gate: pytest.fail("propagated again"))
    assert error_multipliers(Gate.CZ) is first
    assert error_multipliers("CZ") == (7, 7, 5, 5)
