"""Entanglement cooling: T-doped random Clifford benchmark states and the
greedy brute-force disentangler that sweeps bonds with the full two-qubit
Clifford group.

Dense statevectors throughout (N <= 12); contiguous-cut entropies come from
exact Schmidt spectra. The 11520-candidate search at a bond is batched: one
einsum builds all candidate cut matrices, a stacked eigvalsh on the small
side of the cut (dimension <= 2^(N/2)) yields all entropies at once.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dense import (
    MAX_DENSE_QUBITS,
    apply_gate,
    dense_clifford_group,
    entanglement_entropy,
    num_qubits,
    zero_state,
)
from .kernels import Rng
from .tableau import enumerate_clifford_group

_T_GATE = np.diag([1.0, np.exp(1j * np.pi / 4)])


@dataclass
class DopedCircuitSpec:
    """Brickwork Clifford circuit doped with one T gate per time step.

    v is the number of brickwork layers between consecutive T insertions
    (the circuit's light velocity); t_count is the discrete circuit time.
    """

    n: int
    v: int = 1
    t_count: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.n > MAX_DENSE_QUBITS:
            raise ValueError(f"need 2 <= N <= {MAX_DENSE_QUBITS}, got {self.n}")
        if self.v < 1:
            raise ValueError("v >= 1")
        if self.t_count < 0:
            raise ValueError("t_count >= 0")


def _brickwork_clifford_layer(psi, parity, rng):
    n = num_qubits(psi)
    group = dense_clifford_group(2)
    for a in range(parity, n - 1, 2):
        g = group[int(rng.integers(len(group)))]
        psi = apply_gate(psi, g, (a, a + 1))
    return psi


def build_doped_state(spec, rng=None):
    """Dense state after t_count rounds of (v brickwork Clifford layers +
    one T at a uniformly random qubit). t_count = 0 returns |0...0>."""
    rng = rng if rng is not None else Rng(spec.seed)
    psi = zero_state(spec.n)
    layer = 0
    for _ in range(spec.t_count):
        for _ in range(spec.v):
            psi = _brickwork_clifford_layer(psi, layer % 2, rng)
            layer += 1
        q = int(rng.integers(spec.n))
        psi = apply_gate(psi, _T_GATE, (q,))
    return psi


def build_stabilizer_state(n, layers, rng):
    """Undoped benchmark: `layers` brickwork layers of random two-qubit
    Cliffords on |0...0>. Entangled but exactly stabilizer."""
    psi = zero_state(n)
    for layer in range(layers):
        psi = _brickwork_clifford_layer(psi, layer % 2, rng)
    return psi


@dataclass
class CoolingReport:
    n: int
    entropy_trace: list  # max-over-cuts entropy after each sweep, [0] = input
    circuit: list = field(default_factory=list)  # [(name, [qubits]), ...]
    input_sn: float = 0.0
    final_sn: float = 0.0
    sweeps_run: int = 0


def _max_cut_entropy(psi):
    n = num_qubits(psi)
    return max(entanglement_entropy(psi, c) for c in range(1, n))


_DENSE_WORDS = None


def _group_arrays():
    """(stacked 11520 dense gates, matching generator words), identity first."""
    global _DENSE_WORDS
    if _DENSE_WORDS is None:
        tabs = enumerate_clifford_group(2)
        _DENSE_WORDS = [t.word for t in tabs]
        assert _DENSE_WORDS[0] == []  # identity heads the enumeration
    return dense_clifford_group(2), _DENSE_WORDS


def _candidate_entropies(psi, bond):
    """Entropy across cut bond+1 for every two-qubit Clifford on (bond, bond+1).

    Returns a float array over the group enumeration order. Works on the
    smaller side of the cut so the stacked eigenproblem stays <= 2^(N/2).
    """
    n = num_qubits(psi)
    group, _ = _group_arrays()
    a_dim = 1 << bond
    b_dim = 1 << (n - bond - 2)
    theta = psi.reshape(a_dim, 4, b_dim)
    # all candidates at once: K[g, (a u), (v b)]
    k = np.einsum("gxy,ayb->gaxb", group, theta).reshape(-1, 2 * a_dim, 2 * b_dim)
    if 2 * a_dim <= 2 * b_dim:
        m = k @ k.conj().transpose(0, 2, 1)
    else:
        m = k.conj().transpose(0, 2, 1) @ k
    lam = np.linalg.eigvalsh(m)
    lam = np.clip(lam, 1e-18, None)
    return -np.sum(lam * np.log(lam), axis=-1)


def cool(state, sweeps=None, rng=None, objective="cut"):
    """Greedy entanglement cooling by exhaustive two-qubit Clifford search.

    Sweeps bonds left to right; at bond i the gate minimizing the entropy of
    the [0..i] | [i+1..N-1] cut is kept (objective="cut"), or the max over
    all cuts (objective="max"). Ties go to the lowest enumeration index, so
    the identity wins when nothing improves. Stops early once the state is a
    product state or a sweep changes nothing. `rng` is accepted for interface
    symmetry; the search is deterministic.
    """
    psi = np.array(state, dtype=complex)
    n = num_qubits(psi)
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"cooling limited to N <= {MAX_DENSE_QUBITS}")
    if objective not in ("cut", "max"):
        raise ValueError(f"unknown objective {objective!r}")
    if sweeps is None:
        sweeps = n
    group, words = _group_arrays()
    input_max = _max_cut_entropy(psi)
    trace = [input_max]
    circuit = []
    sweeps_run = 0
    for _ in range(sweeps):
        moved = False
        for bond in range(n - 1):
            ents = _candidate_entropies(psi, bond)
            if objective == "max":
                # the gate only touches cut bond+1; fold in the fixed cuts
                others = max(
                    (entanglement_entropy(psi, c) for c in range(1, n) if c != bond + 1),
                    default=0.0,
                )
                ents = np.maximum(ents, others)
            idx = int(np.argmin(ents))
            if ents[0] <= ents[idx] + 1e-12:
                idx = 0  # no real improvement: leave the bond untouched
            if idx == 0:
                continue
            current = entanglement_entropy(psi, bond + 1) if objective == "cut" else trace[-1]
            assert ents[idx] <= current + 1e-9, "accepted move increased the objective"
            psi = apply_gate(psi, group[idx], (bond, bond + 1))
            # stored words are in matrix-product order; emit first-applied-first
            circuit.extend(
                (name, [bond + q for q in qubits]) for name, qubits in reversed(words[idx])
            )
            moved = True
        sweeps_run += 1
        trace.append(_max_cut_entropy(psi))
        if not moved or trace[-1] < 1e-12:
            break
    return CoolingReport(
        n=n,
        entropy_trace=trace,
        circuit=circuit,
        input_sn=input_max / n,
        final_sn=trace[-1] / n,
        sweeps_run=sweeps_run,
    )


def cooling_scan(n_list, vt_over_n_grid, trajectories, rng, v=1, sweeps=None, workers=1):
    """Mean input and cooled S/N (max-cut entropy over N) per (N, vt/N) point.

    Returns a list of row dicts ready for CSV emission. t_count is the
    nearest integer to vt/N * N / v. Trajectories run on `workers` threads
    with per-trajectory child rngs, so results do not depend on the count.
    """
    if trajectories < 2:
        raise ValueError("need at least 2 trajectories")
    rows = []
    for n in n_list:
        for g, vt in enumerate(vt_over_n_grid):
            t_count = int(round(vt * n / v))
            ins = np.empty(trajectories)
            outs = np.empty(trajectories)
            base = rng.child(1000 * n + g)

            def run(traj, n=n, t_count=t_count, base=base):
                spec = DopedCircuitSpec(n=n, v=v, t_count=t_count)
                psi = build_doped_state(spec, base.child(traj))
                rep = cool(psi, sweeps=sweeps)
                ins[traj] = rep.input_sn
                outs[traj] = rep.final_sn

            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    list(pool.map(run, range(trajectories)))
            else:
                for traj in range(trajectories):
                    run(traj)
            rows.append(
                {
                    "n": n,
                    "v": v,
                    "t_count": t_count,
                    "vt_over_n": t_count * v / n,
                    "input_sn": float(ins.mean()),
                    "input_sn_se": float(ins.std(ddof=1) / np.sqrt(trajectories)),
                    "cooled_sn": float(outs.mean()),
                    "cooled_sn_se": float(outs.std(ddof=1) / np.sqrt(trajectories)),
                    "trajectories": trajectories,
                }
            )
    return rows
