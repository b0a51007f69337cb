"""Series solutions of the controllability and observability energy PDEs.

Both energies are stored as ``E(x) = 1/2 sum_k v_k . x^(k)`` with degree-k
coefficient vectors ``v_k`` in R^(n^k).  The degree-2 terms come from the
standard Gramian Lyapunov equations; each higher degree is one linear solve
against a k-way Lyapunov operator whose right-hand side collects the lower
degree cross terms.  The contract of record is the residual of the PDE, which
:func:`hjb_residual` evaluates directly.
"""

import numpy as np
import scipy.linalg as la

from .errors import HypothesisViolation, ResonanceError
from .kron import (
    PolyMap,
    apply_kron_vec,
    kway_lyap_matrix,
    right_kway_product,
    symmetrize_columns,
)

__all__ = [
    "EnergyFunction",
    "solve_observability_energy",
    "solve_controllability_energy",
    "hjb_residual",
    "solve_kway_transposed",
]

# n^k above this size switches the k-way solves from dense LU on the
# materialized operator to the eigendecomposition route.
MATERIALIZE_LIMIT = 10_000


class EnergyFunction:
    """Scalar polynomial ``E(x) = 1/2 sum_k v_k . x^(k)`` with ``E(0) = 0``.

    Coefficients start at degree 2; ``v_2`` reshaped to ``n x n`` is the
    Hessian at the origin.
    """

    def __init__(self, n, coeffs):
        self.n = int(n)
        self.coeffs = {}
        for k, v in coeffs.items():
            v = np.asarray(v, dtype=float).ravel()
            if v.size != self.n ** int(k):
                raise ValueError(f"degree-{k} coefficient has wrong length")
            self.coeffs[int(k)] = symmetrize_columns(v[None, :], self.n, int(k)).ravel()
        for v in self.coeffs.values():
            v.setflags(write=False)
        self._polymap = None

    @property
    def degree(self):
        return max(self.coeffs, default=0)

    @property
    def hessian(self):
        return self.coeffs[2].reshape(self.n, self.n)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = 0.0
        xk = np.ones(1)
        cur = 0
        for k, v in sorted(self.coeffs.items()):
            while cur < k:
                xk = (xk[:, None] * x[None, :]).ravel()
                cur += 1
            out += v @ xk
        return 0.5 * out

    def gradient(self, x):
        """Row gradient ``dE/dx`` at ``x``."""
        return self.as_polymap().jacobian(x).ravel()

    def as_polymap(self):
        """View the energy as a 1-row PolyMap (coefficients already halved)."""
        if self._polymap is None:
            pm = PolyMap(
                {k: 0.5 * v[None, :] for k, v in self.coeffs.items()}, self.n, rows=1
            )
            pm._symmetric = pm  # coefficients are symmetric by construction
            self._polymap = pm
        return self._polymap

    def __repr__(self):
        return f"EnergyFunction(n={self.n}, degree={self.degree})"


def _check_hurwitz(A):
    lam = la.eigvals(A)
    if np.any(lam.real >= 0):
        worst = lam[np.argmax(lam.real)]
        raise HypothesisViolation(
            f"linearization is not Hurwitz (eigenvalue {worst:.6g} has Re >= 0)"
        )
    return lam


def solve_kway_transposed(A, k, rhs, materialize_limit=MATERIALIZE_LIMIT):
    """Solve ``L_k(A)^T v = rhs`` for square ``A``.

    Dense LU on the materialized operator below ``materialize_limit`` unknowns;
    above that, an eigendecomposition of ``A`` reduces the operator to a
    diagonal of eigenvalue sums.  Raises :class:`ResonanceError` when an
    eigenvalue sum vanishes.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    rhs = np.asarray(rhs, dtype=float).ravel()
    if not np.any(rhs):
        return np.zeros_like(rhs)
    materialize = rhs.size <= materialize_limit
    if materialize:
        lam = la.eigvals(A)
    else:
        lam, S = la.eig(A)
    scale = np.abs(lam).max()
    sums = lam.copy()
    for _ in range(k - 1):
        sums = (sums[:, None] + lam[None, :]).ravel()
    if np.abs(sums).min() < 1e-12 * max(scale, 1.0) * k:
        raise ResonanceError(
            f"degree-{k} solve is singular: an eigenvalue sum of the "
            f"linearization is numerically zero (resonance)"
        )
    if materialize:
        return la.solve(kway_lyap_matrix(A, k).T, rhs)
    # A^T = R Lambda R^{-1} with R = S^{-T}; L_k(A^T) = R^(k) diag(sums) R^{-1(k)}
    Sinv = la.inv(S)
    t = apply_kron_vec(S.T, rhs.astype(complex), k)
    t /= sums
    v = apply_kron_vec(Sinv.T, t, k)
    return np.ascontiguousarray(v.real)


def _h_cross_terms(h, k):
    """Degree-k coefficient vector of ``h(x)^T h(x)``."""
    n = h.base_dim
    out = np.zeros(n ** k)
    for a in range(1, k):
        b = k - a
        if a in h.terms and b in h.terms:
            Ha, Hb = h.terms[a], h.terms[b]
            out += (Ha.T @ Hb).reshape(-1)
    return out


def solve_observability_energy(sys, d, materialize_limit=MATERIALIZE_LIMIT):
    """Observability energy to degree ``d``: solves ``dE/dx f + 1/2 h^T h = 0``.

    Degree 2 is the observability Gramian Lyapunov equation
    ``A^T W + W A + H_1^T H_1 = 0``; degree k >= 3 is a linear solve against
    ``L_k(A)^T``.
    """
    if d < 2:
        raise ValueError("degree must be at least 2")
    n = sys.n
    A = sys.A
    _check_hurwitz(A)
    H1 = sys.h.term(1)
    W = la.solve_continuous_lyapunov(A.T, -H1.T @ H1)
    w = {2: 0.5 * (W + W.T).reshape(-1)}
    for k in range(3, d + 1):
        b = np.zeros(n ** k)
        for j in range(2, k):
            if j in sys.f.terms:
                i = k - j + 1
                b += right_kway_product(w[i][None, :], sys.f.terms[j], i, n).ravel()
        b += _h_cross_terms(sys.h, k)
        b = symmetrize_columns(b[None, :], n, k).ravel()
        w[k] = solve_kway_transposed(A, k, -b, materialize_limit)
    return EnergyFunction(n, w)


def solve_controllability_energy(sys, d, materialize_limit=MATERIALIZE_LIMIT):
    """Controllability energy to degree ``d`` from the Hamilton-Jacobi equation.

    Degree 2 inverts the controllability Gramian (the Hessian of the energy is
    the Gramian inverse); each degree k >= 3 solves against
    ``L_k(A + B B^T V_2)^T``, whose operator is nonsingular for a Hurwitz,
    controllable linearization.
    """
    if d < 2:
        raise ValueError("degree must be at least 2")
    n, m = sys.n, sys.m
    A = sys.A
    _check_hurwitz(A)
    B = sys.B
    Wc = la.solve_continuous_lyapunov(A, -B @ B.T)
    Wc = 0.5 * (Wc + Wc.T)
    cond = np.linalg.cond(Wc)
    if not np.isfinite(cond) or cond > 1e13:
        raise HypothesisViolation(
            f"controllability Gramian is numerically singular (cond {cond:.3g}); "
            "the linearization is not controllable"
        )
    V2 = la.inv(Wc)
    V2 = 0.5 * (V2 + V2.T)
    v = {2: V2.reshape(-1)}
    Acl = A + B @ B.T @ V2
    constant_g = all(set(gc.terms) <= {0} for gc in sys.g)
    for k in range(3, d + 1):
        b = np.zeros(n ** k)
        for j in range(2, k):
            if j in sys.f.terms:
                i = k - j + 1
                b += right_kway_product(v[i][None, :], sys.f.terms[j], i, n).ravel()
        # quadratic input term: pair up degree parts of (dE/dx) g^(l), excluding
        # the unknown v_k (its linear appearance is folded into Acl)
        if constant_g:
            # all input columns are constant: batch the columns in one
            # contraction (v_i symmetric, so one slot stands in for all i)
            rho = {}
            for s in range(1, k):
                i = s + 1
                if i >= k:
                    rho[s] = None
                    continue
                vt = v[i].reshape([n] * i)
                rho[s] = 0.5 * i * np.tensordot(B, vt, axes=([0], [0])).reshape(m, -1)
            for s in range(1, k):
                t = k - s
                if rho[s] is not None and rho[t] is not None:
                    b += np.einsum("la,lb->ab", rho[s], rho[t]).reshape(-1)
        else:
            for gc in sys.g:
                rho = {}
                for s in range(1, k):
                    acc = np.zeros(n ** s)
                    for i in range(2, k):
                        p = s - i + 1
                        if 0 <= p and p in gc.terms:
                            acc += 0.5 * right_kway_product(
                                v[i][None, :], gc.terms[p].reshape(n, -1), i, n
                            ).ravel()
                    rho[s] = acc
                for s in range(1, k):
                    t = k - s
                    if np.any(rho[s]) and np.any(rho[t]):
                        b += np.kron(rho[s], rho[t])
        b = symmetrize_columns(b[None, :], n, k).ravel()
        v[k] = symmetrize_columns(
            solve_kway_transposed(Acl, k, -b, materialize_limit)[None, :], n, k
        ).ravel()
    return EnergyFunction(n, v)


def hjb_residual(E, sys, x, which):
    """Left-hand side of the chosen energy PDE evaluated at ``x``.

    ``which`` is ``"controllability"`` (Hamilton-Jacobi equation, with the
    quadratic input term) or ``"observability"`` (Lyapunov-like equation).
    """
    x = np.asarray(x, dtype=float)
    grad = E.gradient(x)
    if which == "controllability":
        gu = grad @ sys.input_matrix(x)
        return grad @ sys.f(x) + 0.5 * float(gu @ gu)
    if which == "observability":
        y = sys.h(x)
        return grad @ sys.f(x) + 0.5 * float(y @ y)
    raise ValueError("which must be 'controllability' or 'observability'")
