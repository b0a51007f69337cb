"""Shared test utilities: ray-scaling fits and rounded-value comparisons."""

import itertools

import numpy as np


def ray_slope(resid_fn, dim, seed=0, eps=None, n_dirs=4, floor=1e-14):
    """Minimum log-log slope of ``|resid_fn(eps * direction)|`` over directions.

    Residuals at or below ``floor`` (relative to the largest sample on the
    ray) count as exact zeros; a ray that is zero everywhere reports +inf.
    """
    if eps is None:
        eps = np.logspace(-3, -1, 7)
    eps = np.asarray(eps, dtype=float)
    rng = np.random.default_rng(seed)
    slopes = []
    for _ in range(n_dirs):
        d = rng.standard_normal(dim)
        d /= np.linalg.norm(d)
        vals = np.array([np.max(np.abs(np.atleast_1d(resid_fn(e * d)))) for e in eps])
        top = vals.max()
        if top <= floor:
            slopes.append(np.inf)
            continue
        keep = vals > max(floor * top, 1e-300)
        if keep.sum() < 3:
            slopes.append(np.inf)
            continue
        slopes.append(np.polyfit(np.log(eps[keep]), np.log(vals[keep]), 1)[0])
    return float(min(slopes))


def sigfig_tol(ref, sig=3, ulp=1.5):
    """Absolute tolerance of ``ulp`` units in the ``sig``-th significant digit."""
    ref = abs(float(ref))
    if ref == 0.0:
        return ulp * 10.0 ** (1 - sig)
    return ulp * 10.0 ** (np.floor(np.log10(ref)) - (sig - 1))


def assert_sigfigs(actual, ref, sig=3, ulp=1.5, label=""):
    actual, ref = float(actual), float(ref)
    tol = sigfig_tol(ref, sig, ulp)
    assert abs(actual - ref) <= tol, (
        f"{label}: {actual:.6g} vs reference {ref:.6g} "
        f"(tol {tol:.2g} at {sig} significant figures)"
    )


def best_state_signs(blocks, refs):
    """Sign vector s in {-1,1}^r minimizing the mismatch of sign-similar data.

    ``blocks``/``refs`` pair up as (kind, array) with kind one of
    ``"similarity"`` (S A S), ``"rows"`` (S A), ``"cols"`` (A S).
    Returns (signs, worst_abs_error) for the best assignment.
    """
    r = None
    for kind, arr in blocks:
        r = arr.shape[0] if kind in ("similarity", "rows") else arr.shape[1]
        break
    best = (None, np.inf)
    for signs in itertools.product((-1.0, 1.0), repeat=r):
        S = np.array(signs)
        worst = 0.0
        for (kind, arr), (_, ref) in zip(blocks, refs):
            if kind == "similarity":
                adj = S[:, None] * arr * S[None, :]
            elif kind == "rows":
                adj = S[:, None] * arr
            else:
                adj = arr * S[None, :]
            worst = max(worst, float(np.max(np.abs(adj - ref))))
        if worst < best[1]:
            best = (S, worst)
    return best
