"""Permutation replica calculus: Weingarten functions by Gram inversion,
the Pauli weight g(sigma), bulk and site-dependent transfer matrices, chain
and trace evaluation, and the closed-form Haar magic averages.

All S_k data (k <= 6) is built once and cached: the permutation list (identity
first), the cycle-count matrix C[i, j] = c(sigma_i^-1 sigma_j), and cycle-type
class labels. Gram matrices are q**C; Weingarten matrices are their inverses,
or Moore-Penrose pseudo-inverses when q < k (the Gram matrix is singular
there, and the pseudo-inverse is the correct Weingarten function for small
dimension). The pseudo-inverse path is exercised by the chi = 1 closed forms.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np


# ---------------------------------------------------------------- S_k tables

_SK_CACHE = {}


def _cycle_lengths(perm):
    k = len(perm)
    seen = [False] * k
    out = []
    for s in range(k):
        if seen[s]:
            continue
        ln = 0
        j = s
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        out.append(ln)
    return tuple(sorted(out))


def sk_tables(k):
    """(perms, index, cycle_count_matrix, cycle_type_of_row0) for S_k.

    cycle_count_matrix[i, j] = number of cycles of perms[i]^-1 perms[j].
    """
    if k in _SK_CACHE:
        return _SK_CACHE[k]
    if k > 6:
        raise ValueError("replica calculus supports k <= 6")
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    nfact = len(perms)
    inv = []
    for p in perms:
        q = [0] * k
        for a, b in enumerate(p):
            q[b] = a
        inv.append(tuple(q))
    ccount = np.empty((nfact, nfact), dtype=np.int8)
    types0 = []
    for i, pi in enumerate(inv):
        for j, pj in enumerate(perms):
            comp = tuple(pj[pi[a]] for a in range(k))  # perms[i]^-1 then perms[j]
            ccount[i, j] = len(_cycle_lengths(comp))
        types0.append(_cycle_lengths(perms[i]))
    _SK_CACHE[k] = (perms, index, ccount, types0)
    return _SK_CACHE[k]


def cycle_type(perm):
    return _cycle_lengths(tuple(perm))


# ------------------------------------------------------------- Weingarten

class WeingartenTable:
    """W[sigma, pi] = Wg(sigma^-1 pi, q): inverse of the Gram q^{c(.)}."""

    def __init__(self, k, q, matrix, pseudo):
        self.k = k
        self.q = q
        self.matrix = matrix
        self.pseudo = pseudo

    def value(self, perm):
        """Wg(perm, q); perm as a tuple in one-line notation."""
        _, index, _, _ = sk_tables(self.k)
        return float(self.matrix[0, index[tuple(perm)]])


def _weingarten_matrix(k, q, allow_pseudo):
    _, _, ccount, _ = sk_tables(k)
    gram = float(q) ** ccount.astype(float)
    if q >= k:
        return np.linalg.inv(gram), False
    if not allow_pseudo:
        raise ValueError(f"Gram matrix singular for q={q} < k={k}")
    # symmetric pseudo-inverse with explicit thresholding; the Gram spectrum
    # is cleanly gapped (numerical zeros ~1e-12 vs true eigenvalues >= O(q^k))
    # and plain np.linalg.pinv mishandles it
    ev, vec = np.linalg.eigh(gram)
    keep = np.abs(ev) > 1e-9 * np.max(np.abs(ev))
    inv = np.where(keep, 1.0 / np.where(keep, ev, 1.0), 0.0)
    return (vec * inv) @ vec.T, True


def weingarten_table(k, q):
    """Weingarten table for U(q) and k-fold averages. Requires q >= k."""
    if q < k:
        raise ValueError(f"Gram matrix singular for q={q} < k={k}")
    w, pseudo = _weingarten_matrix(k, q, allow_pseudo=False)
    return WeingartenTable(k, q, w, pseudo)


# ------------------------------------------------------- transfer matrices

def pauli_weight_g(perm, n):
    """Physical-leg weight g(sigma) = 2^-n (2^c + 3 * 2^c [all cycles even])."""
    lengths = _cycle_lengths(tuple(perm))
    c = len(lengths)
    even = all(ln % 2 == 0 for ln in lengths)
    return 2.0 ** (c - n) * (4.0 if even else 1.0)


def _weight_vector(k, n, weight):
    """Per-site physical-leg weight used inside the transfer matrix.

    The chain produces d^n E[m_n], so each site carries the bare Pauli
    cycle-trace sum sum_alpha prod_c tr(sigma_alpha^{|c|}) = 2^n g(sigma);
    the 2^-n of g's standalone definition is exactly the per-site share of
    the d^-n in m_n. The identity weight 2^{c(sigma)} keeps only the
    identity Pauli and turns the chain into the norm average.
    """
    perms, _, _, types0 = sk_tables(k)
    if weight == "pauli":
        out = []
        for t in types0:
            c = len(t)
            even = all(ln % 2 == 0 for ln in t)
            out.append(2.0**c * (4.0 if even else 1.0))
        return np.array(out)
    if weight == "identity":
        return np.array([2.0 ** len(t) for t in types0])
    raise ValueError(f"unknown weight {weight!r}")


class TransferMatrix:
    def __init__(self, k, n, chi_in, chi_out, matrix):
        self.k = k
        self.n = n
        self.chi_in = chi_in
        self.chi_out = chi_out
        self.q = 2 * chi_out
        self.matrix = matrix


def transfer_matrix_site(k, chi_in, chi_out, n, weight="pauli"):
    """T[sigma, beta] = g(sigma) sum_pi Wg(sigma^-1 pi, 2 chi_out) chi_in^{c(pi^-1 beta)}.

    chi_in = chi_out gives the site-independent bulk matrix. Sites with
    2 chi_out < k use the Gram pseudo-inverse.
    """
    _, _, ccount, _ = sk_tables(k)
    q = 2 * chi_out
    w, _ = _weingarten_matrix(k, q, allow_pseudo=True)
    cmat = float(chi_in) ** ccount.astype(float)
    g = _weight_vector(k, n, weight)
    return TransferMatrix(k, n, chi_in, chi_out, (g[:, None] * w) @ cmat)


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray  # sorted descending by real part
    leading: list  # indices in the leading cluster


def transfer_spectrum(k, chi, n, weight="pauli", gap=0.1):
    """Sorted bulk spectrum with leading-cluster membership (gap threshold)."""
    t = transfer_matrix_site(k, chi, chi, n, weight)
    lam = np.linalg.eigvals(t.matrix)
    order = np.lexsort((np.abs(lam.imag), -lam.real))
    lam = lam[order]
    leading = [0]
    for i in range(1, len(lam)):
        if lam[i - 1].real - lam[i].real > gap:
            break
        leading.append(i)
    return SpectrumResult(lam, leading)


def pbc_trace(k, chi, n_sites, n=None, weight="pauli"):
    """d^n E[m_n] for the periodic chain: sum of lambda^N over the spectrum."""
    if n is None:
        n = k // 2
    spec = transfer_spectrum(k, chi, n, weight)
    val = np.sum(spec.eigenvalues**n_sites)
    return float(val.real)


def _lu_factor_ld(a):
    """Partial-pivot LU in extended precision (no LAPACK for longdouble)."""
    a = a.astype(np.longdouble).copy()
    m = a.shape[0]
    piv = np.arange(m)
    for j in range(m):
        p = j + int(np.argmax(np.abs(a[j:, j])))
        if p != j:
            a[[j, p]] = a[[p, j]]
            piv[[j, p]] = piv[[p, j]]
        a[j + 1 :, j] /= a[j, j]
        a[j + 1 :, j + 1 :] -= np.outer(a[j + 1 :, j], a[j, j + 1 :])
    return a, piv


def _lu_solve_ld(lu, piv, b):
    x = b[piv].astype(np.longdouble)
    m = lu.shape[0]
    for j in range(m - 1):
        x[j + 1 :] -= lu[j + 1 :, j] * x[j]
    for j in range(m - 1, -1, -1):
        x[j] /= lu[j, j]
        if j:
            x[:j] -= lu[:j, j] * x[j]
    return x


_LD_LU_CACHE = {}


def leading_eigenvalue(k, chi, n, precise=False):
    """Largest bulk transfer-matrix eigenvalue.

    The precise path runs two-sided power iteration in extended precision on
    T = diag(g) G^-1 C (solving with a cached longdouble LU of the Gram
    matrix instead of inverting); double precision loses lambda_1 - 1 to
    eigensolver noise once it drops below ~1e-12 (k=6 at chi >= 64).
    """
    if not precise:
        return float(transfer_spectrum(k, chi, n).eigenvalues[0].real)
    _, _, ccount, _ = sk_tables(k)
    q = 2 * chi
    if q < k:
        raise ValueError("precise path needs an invertible Gram (q >= k)")
    key = (k, q)
    if key not in _LD_LU_CACHE:
        _LD_LU_CACHE[key] = _lu_factor_ld(np.longdouble(q) ** ccount)
    lu, piv = _LD_LU_CACHE[key]
    cmat = np.longdouble(chi) ** ccount
    g = _weight_vector(k, n, "pauli").astype(np.longdouble)

    def tmul(x):
        return g * _lu_solve_ld(lu, piv, cmat @ x)

    # left vector needs T^T = C^T G^-1 diag(g); G is symmetric so the same
    # LU works with the solve applied before the C^T contraction
    def tmul_left(x):
        return cmat.T @ _lu_solve_ld(lu, piv, g * x)

    v = np.ones(cmat.shape[0], dtype=np.longdouble)
    w = np.ones(cmat.shape[0], dtype=np.longdouble)
    for _ in range(80):
        v = tmul(v)
        v /= np.max(np.abs(v))
        w = tmul_left(w)
        w /= np.max(np.abs(w))
    return (w @ tmul(v)) / (w @ v)


def pbc_delta(n_sites, chi, n):
    """delta^(n) for the periodic chain: Tr[T^N] - d^n E_Haar[m_n].

    k=6 uses the extended-precision leading eigenvalue; the subleading
    spectrum (limits <= 1/2) is fine in double precision.
    """
    k = 2 * n
    d = 2.0**n_sites if n_sites < 1000 else math.inf
    if n == 2:
        haar_m1 = 3.0 - 12.0 / (d + 3) if math.isfinite(d) else 3.0
    elif n == 3:
        haar_m1 = 15 * (d - 1) / ((3 + d) * (5 + d)) if math.isfinite(d) else 0.0
    else:
        raise ValueError(f"closed form available for n in {{2, 3}}, got {n}")
    lam = transfer_spectrum(k, chi, n).eigenvalues
    if k == 6 and 2 * chi >= k:
        lam1 = leading_eigenvalue(k, chi, n, precise=True)
        rest = complex(np.sum(lam[1:] ** n_sites)).real
        top = np.expm1(n_sites * np.log1p(lam1 - 1))  # lambda_1^N - 1 exactly
        return float(top + rest - haar_m1)
    total = complex(np.sum(lam**n_sites)).real
    return float(total - 1.0 - haar_m1)


def obc_chain_value(k, chi_max, n_sites, n=None, weight="pauli"):
    """d^n E[m_n] for the open staircase chain.

    Evaluated as u^T T^(N) ... T^(1) e_id with site i using
    (q_i = 2 chi_i, chi_in = chi_{i-1}) on the staircase bond profile;
    u is all-ones, e_id the unit vector on the identity permutation.
    """
    from .mps import BondProfile

    if n is None:
        n = k // 2
    prof = BondProfile(n_sites, chi_max)
    nfact = math.factorial(k)
    v = np.zeros(nfact)
    v[0] = 1.0  # identity is first in itertools order
    cache = {}
    for i in range(1, n_sites + 1):
        key = (prof[i - 1], prof[i])
        if key not in cache:
            cache[key] = transfer_matrix_site(k, prof[i - 1], prof[i], n, weight).matrix
        v = cache[key] @ v
    return float(np.sum(v))


# ------------------------------------------------------------ closed forms

def haar_magic_closed_form(d, n):
    """E_Haar[m_n] for n in {2, 3}."""
    if n == 2:
        return (1 + 3 * (d - 1) / (d + 3)) / d**2
    if n == 3:
        return (1 + 15 * (d - 1) / ((3 + d) * (5 + d))) / d**3
    raise ValueError(f"closed form available for n in {{2, 3}}, got {n}")


def haar_magic_scaled(d, n):
    """d^n E_Haar[m_n], in a form stable for astronomically large d."""
    d = float(d) if d < 2.0**1000 else math.inf
    if n == 2:
        return 4.0 - 12.0 / (d + 3) if math.isfinite(d) else 4.0
    if n == 3:
        if not math.isfinite(d):
            return 1.0
        return 1 + 15 * (d - 1) / ((3 + d) * (5 + d))
    raise ValueError(f"closed form available for n in {{2, 3}}, got {n}")


@dataclass
class MagicDeviation:
    n_sites: int
    chi: int
    n: int
    delta: float
    method: str
    se: float | None = None


def delta_chi(n_sites, chi, n, method="analytic", rng=None, samples=10000):
    """delta_chi^(n) = d^n (E_RMPS[m_n] - E_Haar[m_n]).

    Analytic method uses the OBC permutation chain; MC samples the staircase
    ensemble and evaluates exact SREs densely (N <= 10).
    """
    haar = haar_magic_scaled(1 << n_sites, n)
    if method == "analytic":
        val = obc_chain_value(2 * n, chi, n_sites, n)
        return MagicDeviation(n_sites, chi, n, val - haar, "analytic")
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    if rng is None:
        raise ValueError("MC method needs an rng")
    from .dense import exact_sre
    from .mps import sample_rmps_obc

    d = 1 << n_sites
    vals = np.empty(samples)
    for i in range(samples):
        st = sample_rmps_obc(n_sites, chi, rng.child(i))
        vals[i] = exact_sre(st.to_statevector(), n)[0]
    scaled = vals * float(d) ** n
    se = float(np.std(scaled, ddof=1) / np.sqrt(samples))
    return MagicDeviation(n_sites, chi, n, float(np.mean(scaled)) - haar, "mc", se)


@dataclass
class FitResult:
    exponent: float
    coefficient: float
    residual: float


def fit_power_law(points, noise_floor=None, exponent=None):
    """OLS fit of delta = coeff * chi^exponent on log-log axes.

    Nonpositive deltas, and deltas below an optional noise floor, are
    excluded with a warning. Passing `exponent` pins the slope and fits the
    amplitude alone, the usual move when the theory fixes the power.
    """
    xs, ys = [], []
    for chi, delta in points:
        if delta <= 0 or (noise_floor is not None and delta < noise_floor):
            warnings.warn(f"excluding point (chi={chi}, delta={delta:g}) from power-law fit")
            continue
        xs.append(math.log(chi))
        ys.append(math.log(delta))
    if len(xs) < 3:
        raise ValueError("need at least 3 usable points")
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    if exponent is not None:
        logc = float(np.mean(ys - exponent * xs))
        residual = float(np.sum((ys - exponent * xs - logc) ** 2))
        return FitResult(float(exponent), math.exp(logc), residual)
    coef, res = np.polyfit(xs, ys, 1, full=True)[:2]
    residual = float(res[0]) if len(res) else 0.0
    return FitResult(float(coef[0]), float(math.exp(coef[1])), residual)


def symmetric_projector_pauli_trace(d, sigma_is_identity, k=4):
    """Tr[sigma^{(x)k} P_symm^(k)] for a single-site Pauli sigma.

    Uses the cycle expansion (1/k!) sum_pi prod_cycles Tr[sigma^{|c|}], with
    Tr[sigma^m] = d for the identity and d * [m even] for traceless sigma.
    """
    perms, _, _, types0 = sk_tables(k)
    total = 0.0
    for t in types0:
        term = 1.0
        for ln in t:
            if sigma_is_identity or ln % 2 == 0:
                term *= d
            else:
                term = 0.0
                break
        total += term
    return total / math.factorial(k)
