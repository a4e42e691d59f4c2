import numpy as np
import pytest

from cmpslab.dense import entanglement_entropy, haar_state, pauli_expectation_dense, purity
from cmpslab.kernels import Rng, haar_unitary
from cmpslab.mps import (
    BondProfile,
    MpsState,
    apply_two_qubit_gate,
    bipartition_purity,
    entanglement_profile,
    load_mps,
    mps_from_statevector,
    pauli_expectation,
    sample_rmps_obc,
    save_mps,
)
from cmpslab.paulis import hermitian_pauli_from_index


def test_bond_profile_shapes():
    assert BondProfile(6, 8).dims == [1, 8, 8, 8, 4, 2, 1]
    assert BondProfile(4, 1).dims == [1, 1, 1, 1, 1]
    # full cap recovers an unconstrained state
    assert BondProfile(4, 8).dims == [1, 8, 4, 2, 1]
    with pytest.raises(ValueError):
        BondProfile(4, 3)


def test_sampler_normalized_and_right_canonical():
    rng = Rng(1)
    st = sample_rmps_obc(6, 4, rng)
    assert st.norm() == pytest.approx(1.0, abs=1e-12)
    for t in st.tensors:
        m = t.reshape(t.shape[0], -1)
        assert np.allclose(m @ m.conj().T, np.eye(t.shape[0]), atol=1e-12)


def test_sampler_haar_at_full_cap():
    # chi = 2^(N-1): the first unitary covers the whole system, so the
    # ensemble is Haar; check the mean half-cut purity against the closed form
    rng = Rng(2)
    n, samples = 4, 800
    purs = []
    for i in range(samples):
        psi = sample_rmps_obc(n, 8, rng.child(i)).to_statevector()
        purs.append(purity(psi, 2))
    da = db = 4
    want = (da + db) / (da * db + 1)
    se = np.std(purs, ddof=1) / np.sqrt(samples)
    assert abs(np.mean(purs) - want) < 4 * se


def test_pauli_expectation_matches_dense():
    rng = Rng(3)
    psi = haar_state(5, rng)
    st = mps_from_statevector(psi)
    assert abs(np.vdot(st.to_statevector(), psi)) == pytest.approx(1.0, abs=1e-10)
    for _ in range(30):
        p = hermitian_pauli_from_index(5, int(rng.integers(32)), int(rng.integers(32)))
        assert pauli_expectation(st, p) == pytest.approx(
            pauli_expectation_dense(psi, p), abs=1e-10
        )


def test_gate_application_matches_dense():
    rng = Rng(4)
    psi = haar_state(4, rng)
    st = mps_from_statevector(psi)
    g = haar_unitary(4, rng)
    st2, disc = apply_two_qubit_gate(st, g, 1, chi_max=16)
    assert disc == 0.0
    big = np.kron(np.kron(np.eye(2), g), np.eye(2))
    assert abs(np.vdot(st2.to_statevector(), big @ psi)) == pytest.approx(1.0, abs=1e-10)


def test_gate_truncation_renormalizes():
    rng = Rng(5)
    st = sample_rmps_obc(6, 4, rng)
    g = haar_unitary(4, rng)
    st2, disc = apply_two_qubit_gate(st, g, 2, chi_max=2)
    assert st2.norm() == pytest.approx(1.0, abs=1e-12)
    assert 0 <= disc < 1


def test_cnot_makes_bell_pair():
    st = MpsState.product_state([(1 / np.sqrt(2), 1 / np.sqrt(2)), (1, 0)])
    cnot = np.eye(4)[[0, 1, 3, 2]]
    st2, _ = apply_two_qubit_gate(st, cnot, 0, chi_max=2)
    psi = st2.to_statevector()
    want = np.zeros(4)
    want[0] = want[3] = 1 / np.sqrt(2)
    assert abs(np.vdot(psi, want)) == pytest.approx(1.0, abs=1e-12)


def test_purity_and_entropy_match_dense():
    rng = Rng(6)
    psi = haar_state(6, rng)
    st = mps_from_statevector(psi)
    for cut in (1, 2, 3, 5):
        assert bipartition_purity(st, cut) == pytest.approx(purity(psi, cut), abs=1e-10)
    prof = entanglement_profile(st)
    for cut in range(1, 6):
        assert prof.entropies[cut - 1] == pytest.approx(
            entanglement_entropy(psi, cut), abs=1e-9
        )


def test_ghz_profile():
    ghz = np.zeros(16, dtype=complex)
    ghz[0] = ghz[15] = 1 / np.sqrt(2)
    prof = entanglement_profile(mps_from_statevector(ghz))
    assert np.allclose(prof.entropies, np.log(2), atol=1e-10)
    assert prof.max_entropy == pytest.approx(np.log(2), abs=1e-10)


def test_serialization_roundtrip(tmp_path):
    rng = Rng(7)
    st = sample_rmps_obc(5, 4, rng)
    path = tmp_path / "state.mps"
    save_mps(st, path, seed=7)
    back = load_mps(path)
    assert back.bond_dims == st.bond_dims
    assert abs(np.vdot(back.to_statevector(), st.to_statevector())) == pytest.approx(
        1.0, abs=1e-12
    )
    # header is plain JSON after the 8-byte length
    import json
    import struct

    with open(path, "rb") as fh:
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen))
    assert header["format"] == "mps-v1"
    assert header["seed"] == 7
    assert header["bond_dims"] == st.bond_dims


def test_load_rejects_unknown_format(tmp_path):
    import json
    import struct

    path = tmp_path / "bad.mps"
    blob = json.dumps({"format": "mps-v9"}).encode()
    path.write_bytes(struct.pack("<Q", len(blob)) + blob)
    with pytest.raises(ValueError):
        load_mps(path)
