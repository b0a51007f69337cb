"""Input-normal/output-diagonal transformation and squared singular value functions.

After the linear stage normalizes the energies (controllability Hessian I,
observability Hessian diag(sigma_i^2)), each transform degree k is found by
collecting the degree-(k+1) coefficients of two conditions on the composed
energies: the controllability energy must stay exactly quadratic, and the
observability energy may carry only pure powers z_i^(k+1) (whose values define
the singular-value-function coefficients).  The resulting linear system
decouples monomial by monomial; each monomial gives at most two equations in
one unknown per distinct state, solved in minimum-norm least-squares sense.
That gauge choice is one of many valid ones, so tests should assert the
residual contracts and the sigma^2 series rather than raw coefficients.
"""

import math
from functools import lru_cache

import numpy as np
import scipy.linalg as la

from .errors import HypothesisViolation
from .kron import PolyMap, apply_kron_vec, column_multi_indices, mat_times_kron
from .kron import compositions as _compositions

__all__ = [
    "SqSingularValueFns",
    "InodResult",
    "linear_balancing",
    "compute_inod_transform",
]


class SqSingularValueFns:
    """Per-state scalar series ``sigma_i^2(z_i) = c_0 + c_1 z_i + ...``.

    ``coeffs`` has shape ``(n, d+1)``; row i holds the coefficients for state i.
    """

    def __init__(self, coeffs):
        self.coeffs = np.array(coeffs, dtype=float, ndmin=2)
        if np.any(self.coeffs[:, 0] <= 0):
            raise HypothesisViolation("sigma^2 constant terms must be positive")
        self.coeffs.setflags(write=False)

    @property
    def n(self):
        return self.coeffs.shape[0]

    def value(self, z):
        """Componentwise ``sigma_i^2(z_i)`` for a state vector ``z``."""
        z = np.asarray(z, dtype=float)
        out = self.coeffs[:, -1].copy()
        for j in range(self.coeffs.shape[1] - 2, -1, -1):
            out = out * z + self.coeffs[:, j]
        return out

    def derivative(self, z):
        """Componentwise ``d sigma_i^2 / d z_i``."""
        z = np.asarray(z, dtype=float)
        d = self.coeffs.shape[1] - 1
        if d == 0:
            return np.zeros(self.n)
        out = d * self.coeffs[:, -1].copy()
        for j in range(d - 1, 0, -1):
            out = out * z + j * self.coeffs[:, j]
        return out

    def hankel_values(self):
        return np.sqrt(self.coeffs[:, 0])


class InodResult:
    """Transform ``x = Phi(z)`` plus the squared singular value functions."""

    def __init__(self, transform, t1_inverse, sq_sv):
        self.transform = transform
        self.t1_inverse = np.asarray(t1_inverse, dtype=float)
        self.sq_sv = sq_sv

    @property
    def hankel(self):
        return self.sq_sv.hankel_values()


def linear_balancing(Ec, Eo, gap_tol=1e-10):
    """Linear input-normal/output-diagonal stage via square-root balancing.

    Returns ``(T1, T1_inverse, hankel)`` with ``T1^T V2(Ec) T1 = I`` and
    ``T1^T V2(Eo) T1 = diag(hankel**2)``.  The inverse comes from the SVD
    factors, not a matrix inversion.  Raises :class:`HypothesisViolation` for
    indefinite Hessians or repeated/zero Hankel singular values.
    """
    V2 = Ec.hessian
    W2 = Eo.hessian
    try:
        # V2 is the Gramian inverse; factor the Gramian itself
        Lc = la.cholesky(la.inv(V2), lower=True)
        Lo = la.cholesky(W2, lower=True)
    except la.LinAlgError as exc:
        raise HypothesisViolation(
            "energy Hessians are not positive definite; the linearization is "
            "not minimal"
        ) from exc
    U, s, Vh = la.svd(Lo.T @ Lc)
    if s[-1] <= gap_tol * s[0]:
        raise HypothesisViolation(
            f"Hankel singular value {s[-1]:.3g} is numerically zero"
        )
    if s.size > 1 and np.min(-np.diff(s)) < gap_tol * s[0]:
        raise HypothesisViolation(
            "repeated Hankel singular values: "
            + ", ".join(f"{x:.6g}" for x in s)
        )
    T1 = Lc @ Vh.T
    T1inv = (U / s).T @ Lo.T
    # canonical column signs for reproducibility: largest-|entry| positive
    picks = np.abs(T1).argmax(axis=0)
    signs = np.sign(T1[picks, np.arange(T1.shape[1])])
    signs[signs == 0] = 1.0
    T1 *= signs[None, :]
    T1inv *= signs[:, None]
    return T1, T1inv, s


def _transform_energy_coeffs(E, T1):
    """Coefficient vectors of ``E(T1 z)``: v_k -> (T1^T)^(k) v_k."""
    return {k: apply_kron_vec(T1.T, v, k) for k, v in E.coeffs.items()}


def compute_inod_transform(Ec, Eo, d_transf, gap_tol=1e-10):
    """Degree-``d_transf`` input-normal/output-diagonal transform.

    Needs energies to degree ``d_transf + 1``.  The returned transform
    satisfies, up to the stated order,

    - ``Ec(Phi(z)) = 1/2 |z|^2 + O(|z|^(d_transf+2))``
    - ``Eo(Phi(z)) = 1/2 sum_i z_i^2 sigma_i^2(z_i) + O(|z|^(d_transf+2))``

    with no cross terms in the observability energy through degree
    ``d_transf + 1``.
    """
    n = Ec.n
    if Eo.n != n:
        raise ValueError("energy dimensions differ")
    if d_transf < 1:
        raise ValueError("transform degree must be at least 1")
    if Ec.degree < 2 or Eo.degree < 2:
        raise ValueError("energies must reach degree 2")
    # energy degrees above the stored maximum are treated as exactly zero
    T1, T1inv, hankel = linear_balancing(Ec, Eo, gap_tol=gap_tol)
    sig2 = hankel ** 2
    vt = _transform_energy_coeffs(Ec, T1)
    wt = _transform_energy_coeffs(Eo, T1)
    Ttil = {1: np.eye(n)}
    c = np.zeros((n, max(d_transf, 1)))
    c[:, 0] = sig2
    for k in range(2, d_transf + 1):
        q = k + 1
        known_a = np.zeros(n ** q)
        known_b = np.zeros(n ** q)
        for j in range(2, q + 1):
            for comp in _compositions(q, j):
                if any(ci >= k or ci not in Ttil for ci in comp):
                    continue
                factors = [Ttil[ci] for ci in comp]
                if j in vt:
                    known_a += mat_times_kron(vt[j][None, :], factors).ravel()
                if j in wt:
                    known_b += mat_times_kron(wt[j][None, :], factors).ravel()
        Tk, c_k = _solve_degree(known_a, known_b, sig2, n, k)
        Ttil[k] = Tk
        c[:, k - 1] = c_k
    transform = PolyMap(
        {k: (T1 if k == 1 else T1 @ W) for k, W in Ttil.items()}, n, rows=n
    )
    result = InodResult(transform, T1inv, SqSingularValueFns(c))
    _check_contracts(result, Ec, Eo, d_transf)
    return result


@lru_cache(maxsize=8)
def _degree_structure(n, k):
    """Sigma-independent combinatorics of the degree-k per-monomial solve."""
    q = k + 1
    # encode every degree-q column by its sorted multiset
    idx_q = column_multi_indices(n, q)
    keys_q = np.sort(idx_q, axis=1)
    enc_q = np.zeros(keys_q.shape[0], dtype=np.int64)
    for j in range(q):
        enc_q = enc_q * n + keys_q[:, j]
    uniq_enc, inv_q = np.unique(enc_q, return_inverse=True)

    # degree-k monomials and their per-state occurrence counts
    idx_k = column_multi_indices(n, k)
    keys_k = np.sort(idx_k, axis=1)
    enc_k = np.zeros(keys_k.shape[0], dtype=np.int64)
    for j in range(k):
        enc_k = enc_k * n + keys_k[:, j]
    _, first_k, inv_k = np.unique(enc_k, return_index=True, return_inverse=True)
    monos_k = keys_k[first_k]  # (Mk, k) sorted representatives
    Mk = monos_k.shape[0]
    occ = (monos_k[:, :, None] == np.arange(n)[None, None, :]).sum(axis=1)  # (Mk, n)
    fact = np.array([math.factorial(j) for j in range(k + 2)], dtype=float)
    prodfact_mu = fact[occ].prod(axis=1)  # prod of count! over states, per monomial

    # all (state, monomial) pairs: the pair (i, mu) belongs to monomial mu+{i}
    states = np.repeat(np.arange(n), Mk)          # pair -> state i
    mus = np.tile(np.arange(Mk), n)               # pair -> degree-k monomial id
    pair_keys = np.sort(
        np.concatenate([monos_k[mus], states[:, None]], axis=1), axis=1
    )
    enc_pair = np.zeros(pair_keys.shape[0], dtype=np.int64)
    for j in range(q):
        enc_pair = enc_pair * n + pair_keys[:, j]
    mid = np.searchsorted(uniq_enc, enc_pair)     # pair -> degree-q monomial id

    w = occ[mus, states] + 1.0                    # multiplicity of i in mu+{i}
    base = fact[k] / (prodfact_mu[mus] * w)       # arrangements of mu+{i} minus one i
    nm = uniq_enc.size
    npairs = np.bincount(mid, minlength=nm)
    return inv_q, inv_k, Mk, states, mid, w, base, nm, npairs


def _solve_degree(known_a, known_b, sig2, n, k):
    """Per-monomial minimum-norm solve for the degree-k transform coefficients.

    Unknowns are the entries ``T[i, mu]`` over (state, degree-k monomial)
    pairs; the pair belongs to the degree-(k+1) monomial ``mu + {i}``.  Each
    monomial contributes the two scalar equations described in the module
    docstring.
    """
    inv_q, inv_k, Mk, states, mid, w, base, nm, npairs = _degree_structure(n, k)
    alpha = np.bincount(inv_q, weights=known_a, minlength=nm)
    beta = np.bincount(inv_q, weights=known_b, minlength=nm)
    s2 = sig2[states]
    S2 = np.bincount(mid, weights=w * w, minlength=nm)
    S2s = np.bincount(mid, weights=w * w * s2, minlength=nm)
    S2ss = np.bincount(mid, weights=w * w * s2 * s2, minlength=nm)
    base_m = np.zeros(nm)
    base_m[mid] = base                            # identical for all pairs of a monomial

    ra = -alpha / (2.0 * base_m)
    rb = -beta / (2.0 * base_m)

    pure = npairs == 1
    mixed = ~pure
    # minimum-norm solution of [w.u ; w s2.u] = [ra ; rb] via the 2x2 normal matrix
    det = S2 * S2ss - S2s ** 2
    det_scale = np.where(mixed, S2 * S2ss, 1.0)
    if np.any(mixed & (det <= 1e-12 * det_scale)):
        raise HypothesisViolation(
            "singular-value functions too close: the degree-%d transform solve "
            "is rank deficient beyond its gauge freedom" % k
        )
    lam1 = np.zeros(nm)
    lam2 = np.zeros(nm)
    lam1[mixed] = (S2ss[mixed] * ra[mixed] - S2s[mixed] * rb[mixed]) / det[mixed]
    lam2[mixed] = (-S2s[mixed] * ra[mixed] + S2[mixed] * rb[mixed]) / det[mixed]

    u = np.where(
        pure[mid],
        ra[mid] / w,
        w * (lam1[mid] + s2 * lam2[mid]),
    )
    vals = u.reshape(n, Mk)
    Tk = vals[:, inv_k]

    # pure-power monomials define the next sigma^2 coefficients
    c_k = np.zeros(n)
    pure_pairs = pure[mid]
    ci = states[pure_pairs]
    c_k[ci] = 2.0 * base[pure_pairs] * w[pure_pairs] * s2[pure_pairs] * u[pure_pairs] + beta[
        mid[pure_pairs]
    ]
    return Tk, c_k


def _check_contracts(result, Ec, Eo, d_transf, n_dirs=2, seed=0):
    """Internal consistency check: the residual contracts must contract.

    Both conditions are evaluated on shrinking rays.  In exact arithmetic a
    decade of shrinkage reduces the residuals by 10^(d_transf+2); here one
    decade must buy at least 10^1.5 unless the residual already sits at the
    relative rounding floor.  Scale-free, so it works for badly scaled models.
    """
    if d_transf < 2:
        return
    n = Ec.n
    rng = np.random.default_rng(seed)
    sig2 = result.sq_sv
    for _ in range(n_dirs):
        z = rng.standard_normal(n)
        z /= la.norm(z)
        resid = []
        for eps in (3e-2, 3e-3):
            zz = eps * z
            x = result.transform(zz)
            ra = Ec.value(x) - 0.5 * np.sum(zz ** 2)
            rb = Eo.value(x) - 0.5 * np.sum(zz ** 2 * sig2.value(zz))
            floor = 1e-8 * max(abs(Ec.value(x)), abs(Eo.value(x)), 1e-300)
            resid.append((ra, rb, floor))
        for idx in range(2):
            prev, cur = resid[0][idx], resid[1][idx]
            if abs(prev) <= resid[0][2] and abs(cur) <= resid[1][2]:
                continue
            if abs(cur) > abs(prev) * 10 ** -1.5:
                raise RuntimeError(
                    "input-normal/output-diagonal residual does not contract; "
                    "the degree solve is inconsistent"
                )
