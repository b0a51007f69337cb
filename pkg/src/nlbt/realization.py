"""Explicit balanced realization, inverse transformation, and truncation.

The drift/input recursions isolate each unknown coefficient behind the
(analytically invertible) linear transform coefficient instead of inverting
the full nonlinear Jacobian.  The degree-0 input column transforms as
``Tbar_1^{-1} G_0``, which is forced by evaluating the transformed state
equation at the origin; its coupling term ``Tbar_{k+1} L_{k+1}(Gbar_0)``
enters every higher degree.

Truncation keeps the leading ``r`` rows and the columns whose multi-indices
only touch retained states, which realizes the balance-then-truncate map
exactly.  The condition number ``sigma_1/sigma_n`` of the Hankel values is the
ill-conditioning diagnostic for that computation.
"""

import numpy as np

from .kron import (
    ControlAffineSystem,
    PolyMap,
    mat_times_tensor_sum,
    right_kway_product,
    symmetrize_columns,
)

__all__ = [
    "balanced_drift",
    "balanced_input",
    "balanced_output",
    "balanced_system",
    "inverse_transform_coeffs",
    "truncate_columns",
    "truncate_transform",
    "build_rom",
    "BalancedRealization",
    "ReducedOrderModel",
]


def _sym_terms(Tbar):
    """Symmetrized transform coefficients, keyed by degree (degree >= 1)."""
    sym = Tbar.symmetrized()
    return {k: W for k, W in sym.terms.items() if k >= 1}


def balanced_drift(f, Tbar, Tbar1_inv, d):
    """Drift coefficients of the balanced realization, degrees 1..d.

    ``Fbar_k = Tbar_1^{-1} [ sum_j F_j Tcal_{j,k} - sum_{i>=2} Tbar_i L_i(Fbar_{k-i+1}) ]``,
    evaluated in increasing k.  The bracket is only a coefficient identity up
    to column symmetry (both sides represent the same polynomial), so it is
    symmetrized before the solve; the result is the canonical symmetric
    representative.
    """
    n = Tbar.rows
    Ts = _sym_terms(Tbar)
    dT = max(Ts)
    Fbar = {}
    for k in range(1, d + 1):
        rhs = np.zeros((n, n ** k))
        for j in range(1, k + 1):
            if j in f.terms:
                term = mat_times_tensor_sum(f.terms[j], Ts, j, k)
                if term is not None:
                    rhs += term
        for i in range(2, min(k, dT) + 1):
            jj = k - i + 1
            if jj in Fbar:
                rhs -= right_kway_product(Ts[i], Fbar[jj], i, n)
        Fbar[k] = Tbar1_inv @ symmetrize_columns(rhs, n, k)
    return PolyMap(Fbar, n, rows=n)


def balanced_input(g_column, Tbar, Tbar1_inv, d):
    """One input column of the balanced realization, degrees 0..d.

    Same recursion as the drift; the constant column seeds it, and its k-way
    coupling with ``Tbar_{k+1}`` is kept (the term a degree-(k+1) transform
    contributes against the constant input).
    """
    n = Tbar.rows
    Ts = _sym_terms(Tbar)
    dT = max(Ts)
    Gbar = {0: Tbar1_inv @ g_column.term(0)}
    for k in range(1, d + 1):
        rhs = np.zeros((n, n ** k))
        for j in range(1, k + 1):
            if j in g_column.terms:
                term = mat_times_tensor_sum(g_column.terms[j], Ts, j, k)
                if term is not None:
                    rhs += term
        for i in range(2, min(k + 1, dT) + 1):
            jj = k - i + 1
            if jj in Gbar:
                rhs -= right_kway_product(Ts[i], Gbar[jj], i, n)
        Gbar[k] = Tbar1_inv @ symmetrize_columns(rhs, n, k)
    return PolyMap(Gbar, n, rows=n)


def balanced_output(h, Tbar, d):
    """Output coefficients ``Hbar_k = sum_j H_j Tcal_{j,k}``: a plain composition."""
    n = Tbar.rows
    Ts = _sym_terms(Tbar)
    Hbar = {}
    for k in range(1, d + 1):
        acc = None
        for j in range(1, k + 1):
            if j in h.terms:
                term = mat_times_tensor_sum(h.terms[j], Ts, j, k)
                if term is not None:
                    acc = term if acc is None else acc + term
        if acc is not None:
            Hbar[k] = symmetrize_columns(acc, n, k)
    return PolyMap(Hbar, n, rows=h.rows)


def balanced_system(sys, Tbar, Tbar1_inv, d, g_degree=None, threads=1):
    """Full balanced realization of ``sys`` under ``Tbar``.

    Drift and output run to degree ``d``; the input map runs to ``g_degree``,
    by default ``d - 1`` (a degree-d model template pairs a degree-d drift
    with a degree-(d-1) input map).
    """
    dg = d - 1 if g_degree is None else g_degree
    fbar = balanced_drift(sys.f, Tbar, Tbar1_inv, d)
    if threads > 1 and sys.m > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            gbar = list(
                pool.map(lambda gc: balanced_input(gc, Tbar, Tbar1_inv, dg), sys.g)
            )
    else:
        gbar = [balanced_input(gc, Tbar, Tbar1_inv, dg) for gc in sys.g]
    hbar = balanced_output(sys.h, Tbar, d)
    return ControlAffineSystem(fbar, gbar, hbar)


def inverse_transform_coeffs(Tbar, Tbar1_inv, d):
    """Series inverse ``P`` of the balancing transformation.

    ``P_1 = Tbar_1^{-1}`` (the analytically known square-root-balancing
    inverse) and ``P_i = (-sum_{j<i} P_j Tcal_{j,i}) (P_1 (x) ... (x) P_1)``.
    Satisfies ``P(Tbar(z)) = z + O(|z|^(d+1))``.
    """
    n = Tbar.rows
    Ts = _sym_terms(Tbar)
    from .kron import mat_times_kron

    P = {1: np.asarray(Tbar1_inv, dtype=float)}
    for i in range(2, d + 1):
        acc = np.zeros((n, n ** i))
        for j in range(1, i):
            term = mat_times_tensor_sum(P[j], Ts, j, i)
            if term is not None:
                acc += term
        P[i] = symmetrize_columns(-mat_times_kron(acc, [P[1]] * i), n, i)
    return PolyMap(P, n, rows=n)


def _retained_column_map(n, r, k):
    """For each of the r^k retained columns, its source column among n^k."""
    src = np.zeros(r ** k, dtype=np.int64)
    rem = np.arange(r ** k, dtype=np.int64)
    for j in range(k - 1, -1, -1):
        digit = rem // r ** j
        rem = rem % r ** j
        src = src * n + digit
    return src


def truncate_columns(W, n, r, k):
    """Keep the columns of ``W`` whose multi-indices only involve states < r."""
    if k == 0:
        return W.copy()
    return W[:, _retained_column_map(n, r, k)]


def truncate_transform(Tbar, r):
    """Reduced transform ``T^(r)``: eliminate columns touching truncated states.

    Evaluating the result at ``x_r`` equals evaluating ``Tbar`` at
    ``[x_r; 0]``.
    """
    n = Tbar.base_dim
    if not 1 <= r <= n:
        raise ValueError(f"r must be in 1..{n}")
    terms = {
        k: truncate_columns(W, n, r, k) for k, W in Tbar.terms.items() if k >= 1
    }
    return PolyMap(terms, r, rows=Tbar.rows)


class BalancedRealization:
    """Balanced-coordinate system plus the transforms that produced it."""

    def __init__(self, sys, Tbar, P, hankel):
        self.sys = sys
        self.Tbar = Tbar
        self.P = P
        self.hankel = np.asarray(hankel, dtype=float)

    @property
    def sigma_condition(self):
        """Hankel spread ``sigma_1/sigma_n``: the balance-then-truncate conditioning."""
        return float(self.hankel[0] / self.hankel[-1])

    def initial_condition(self, x0):
        """Map a full-state initial condition into balanced coordinates."""
        return self.P(np.asarray(x0, dtype=float))


class ReducedOrderModel:
    """Order-r truncation of a balanced realization.

    ``sys`` is the reduced control-affine system, ``T_r`` maps reduced states
    back to the full-order state space, and ``P`` (the full inverse transform)
    supplies reduced initial conditions.
    """

    def __init__(self, r, sys, T_r, P, x_r0, hankel):
        self.r = r
        self.sys = sys
        self.T_r = T_r
        self.P = P
        self.x_r0 = np.asarray(x_r0, dtype=float)
        self.hankel = np.asarray(hankel, dtype=float)

    def initial_condition(self, x0):
        return self.P(np.asarray(x0, dtype=float))[: self.r]

    def lift(self, x_r):
        """Approximate full-order state on the reduced manifold."""
        return self.T_r(np.asarray(x_r, dtype=float))


def build_rom(balanced, r, x0=None):
    """Truncate a :class:`BalancedRealization` to order ``r``.

    Coefficients are sliced from the full balanced realization: leading ``r``
    rows for drift/input (all ``p`` rows for the output), retained-state
    columns everywhere.  ``r = n`` reproduces the balanced realization exactly.
    """
    full = balanced.sys
    n = full.n
    if not 1 <= r <= n:
        raise ValueError(f"r must be in 1..{n}")
    f_r = PolyMap(
        {k: truncate_columns(W[:r], n, r, k) for k, W in full.f.terms.items()},
        r,
        rows=r,
    )
    g_r = [
        PolyMap(
            {k: truncate_columns(W[:r], n, r, k) for k, W in gc.terms.items()},
            r,
            rows=r,
        )
        for gc in full.g
    ]
    h_r = PolyMap(
        {k: truncate_columns(W, n, r, k) for k, W in full.h.terms.items()},
        r,
        rows=full.p,
    )
    T_r = truncate_transform(balanced.Tbar, r)
    x_r0 = (
        balanced.initial_condition(x0)[:r] if x0 is not None else np.zeros(r)
    )
    rom_sys = ControlAffineSystem(f_r, g_r, h_r)
    return ReducedOrderModel(r, rom_sys, T_r, balanced.P, x_r0, balanced.hankel)
