import numpy as np
import pytest

from cmpslab.cooling import (
    CoolingReport,
    DopedCircuitSpec,
    build_doped_state,
    build_stabilizer_state,
    cool,
    cooling_scan,
)
from cmpslab.dense import apply_gate, entanglement_entropy, exact_sre, zero_state
from cmpslab.kernels import Rng

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j])
_CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
_GATES = {"H": _H, "S": _S, "CNOT": _CNOT}


def replay(psi, circuit):
    v = psi.copy()
    for name, qubits in circuit:
        v = apply_gate(v, _GATES[name], tuple(qubits))
    return v


def test_spec_validation():
    with pytest.raises(ValueError):
        DopedCircuitSpec(n=1)
    with pytest.raises(ValueError):
        DopedCircuitSpec(n=4, v=0)
    with pytest.raises(ValueError):
        DopedCircuitSpec(n=4, t_count=-1)


def test_undoped_state_is_stabilizer():
    spec = DopedCircuitSpec(n=4, t_count=0)
    psi = build_doped_state(spec)
    assert np.allclose(psi, zero_state(4))
    psi = build_stabilizer_state(6, 6, Rng(1))
    assert exact_sre(psi, 2)[1] < 1e-10


def test_doped_state_has_magic_and_is_reproducible():
    spec = DopedCircuitSpec(n=6, v=1, t_count=3, seed=11)
    psi = build_doped_state(spec)
    assert exact_sre(psi, 2)[1] > 1e-3
    assert np.array_equal(psi, build_doped_state(spec))


def test_zero_state_cools_trivially():
    rep = cool(zero_state(4))
    assert max(rep.entropy_trace) < 1e-12
    assert rep.circuit == []


def test_stabilizer_state_cools_to_zero():
    rng = Rng(2)
    for i in range(3):
        psi = build_stabilizer_state(5, 5, rng.child(i))
        rep = cool(psi)
        assert rep.entropy_trace[-1] < 1e-8
        assert rep.sweeps_run <= 5


def test_trace_non_increasing_and_roundtrip():
    psi = build_doped_state(DopedCircuitSpec(n=5, v=1, t_count=3, seed=7))
    rep = cool(psi)
    for a, b in zip(rep.entropy_trace, rep.entropy_trace[1:]):
        assert b <= a + 1e-9
    final = replay(psi, rep.circuit)
    got = max(entanglement_entropy(final, c) for c in range(1, 5))
    assert got == pytest.approx(rep.entropy_trace[-1], abs=1e-9)


def test_cooling_preserves_sre():
    psi = build_doped_state(DopedCircuitSpec(n=5, v=1, t_count=2, seed=3))
    m2_in = exact_sre(psi, 2)[1]
    rep = cool(psi)
    final = replay(psi, rep.circuit)
    assert exact_sre(final, 2)[1] == pytest.approx(m2_in, abs=1e-9)


def test_max_objective_non_increasing():
    psi = build_doped_state(DopedCircuitSpec(n=5, v=1, t_count=3, seed=9))
    rep = cool(psi, objective="max")
    for a, b in zip(rep.entropy_trace, rep.entropy_trace[1:]):
        assert b <= a + 1e-9


def test_cooling_scan_rows():
    rows = cooling_scan([4], [0.0, 0.5], 3, Rng(5))
    assert len(rows) == 2
    assert rows[0]["t_count"] == 0
    assert rows[0]["input_sn"] == 0.0
    assert rows[0]["cooled_sn"] == 0.0
    assert rows[1]["t_count"] == 2
    # scan is reproducible
    again = cooling_scan([4], [0.0, 0.5], 3, Rng(5))
    assert rows == again


def test_workers_do_not_change_results():
    serial = cooling_scan([4], [0.5], 4, Rng(6), workers=1)
    threaded = cooling_scan([4], [0.5], 4, Rng(6), workers=3)
    assert serial == threaded
