"""NumPy implementations of the hot numerical kernels.

Same call surface as the compiled ``polydyn._speedups`` module; selected
at import by ``polydyn.kernels`` when the extension is missing or disabled.
Coefficients are always ascending (a_0 .. a_d) complex128 arrays.
"""

import numpy as np

BACKEND = "python"

# Fixed irrational phase (radians) breaking the symmetry of circular
# starting guesses for polynomials like z^d - c.
GUESS_PHASE = 0.7390851332151607


def horner_many(coeffs, zs):
    """Evaluate sum_k a_k z^k at each z (any array shape)."""
    zs = np.asarray(zs, dtype=np.complex128)
    out = np.full(zs.shape, coeffs[-1], dtype=np.complex128)
    for k in range(len(coeffs) - 2, -1, -1):
        out *= zs
        out += coeffs[k]
    return out


def _horner_rows(coeff_rows, zs):
    # coeff_rows: (W, d+1), zs: (W, m) -> (W, m)
    out = np.broadcast_to(coeff_rows[:, -1:], zs.shape).copy()
    for k in range(coeff_rows.shape[1] - 2, -1, -1):
        out *= zs
        out += coeff_rows[:, k : k + 1]
    return out


def iterate_escape(coeffs, zs, n, radius):
    """Apply the polynomial n times with escape detection.

    Returns (values, steps) where steps[i] is the first iterate index at
    which |z| exceeded radius, or -1 if the whole orbit stayed bounded.
    Escaped entries stop iterating; their value is the escaping iterate.
    """
    z = np.array(zs, dtype=np.complex128)
    steps = np.full(z.shape, -1, dtype=np.int64)
    alive = np.ones(z.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n + 1):
            if not alive.any():
                break
            z[alive] = horner_many(coeffs, z[alive])
            escaped = alive & ~(np.abs(z) <= radius)
            steps[escaped] = k
            alive &= ~escaped
    return z, steps


def aberth_batch(coeffs, ws, tol, max_iter):
    """Simultaneously solve P(z) = w for every w in ws.

    Aberth-Ehrlich iteration on all d roots of each shifted polynomial
    P - w, from circular starting guesses. Returns
    (roots (W, d), residuals (W, d), converged (W,) bool); residuals are
    |P(root) - w|. Convergence target per root is
    tol * max(max_k |a_k|, sum_k |a_k| |z|^k): the local evaluation
    scale, so the criterion is a relative backward error and stays
    reachable for high-degree polynomials with roots outside the unit
    disc, where the plain coefficient scale sits below the
    floating-point evaluation floor.
    """
    a = np.asarray(coeffs, dtype=np.complex128)
    d = len(a) - 1
    ws = np.asarray(ws, dtype=np.complex128).ravel()
    nw = ws.shape[0]
    if d < 1:
        raise ValueError("degree must be at least 1")
    if nw == 0:
        return (
            np.empty((0, d), np.complex128),
            np.empty((0, d), float),
            np.empty((0,), bool),
        )
    shifted0 = a[0] - ws  # constant terms, one per row
    if d == 1:
        roots = (-shifted0 / a[1]).reshape(nw, 1)
        return roots, np.zeros((nw, 1)), np.ones(nw, dtype=bool)

    rows = np.tile(a, (nw, 1))
    rows[:, 0] = shifted0
    abs_rows = np.abs(rows).astype(np.complex128)
    da = a[1:] * np.arange(1, d + 1)

    scale = np.maximum(np.max(np.abs(a[1:])), np.abs(shifted0))

    lead = np.abs(a[-1])
    guess_r = 1.0 + np.maximum(
        np.max(np.abs(a[1:-1]) / lead) if d > 1 else 0.0,
        np.abs(shifted0) / lead,
    )
    angles = 2.0 * np.pi * np.arange(d) / d + GUESS_PHASE
    z = guess_r[:, None] * np.exp(1j * angles)[None, :]

    def targets(zv):
        eval_scale = _horner_rows(abs_rows, np.abs(zv) + 0j).real
        return tol * np.maximum(scale[:, None], eval_scale)

    converged = np.zeros(nw, dtype=bool)
    resid = np.empty((nw, d))
    idx = np.arange(d)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            p = _horner_rows(rows, z)
            resid = np.abs(p)
            wild = ~np.isfinite(resid)
            done_root = (resid <= targets(z)) & ~wild
            converged = done_root.all(axis=1)
            if converged.all():
                break
            dp = horner_many(da, z)
            deriv_dead = np.abs(dp) * (1.0 + np.abs(p)) == 0.0
            newton = p / np.where(deriv_dead, 1.0, dp)
            diff = z[:, :, None] - z[:, None, :]
            diff[:, idx, idx] = 1.0  # excluded from the pair sum below
            collided = np.abs(diff) == 0.0
            inv = 1.0 / np.where(collided, 1.0, diff)
            inv[:, idx, idx] = 0.0
            s = inv.sum(axis=2)
            denom = 1.0 - newton * s
            # A vanishing denominator falls back to the plain Newton step.
            corr = np.where(np.abs(denom) < 1e-12, newton, newton / denom)
            # Cap the step and rescue overflowed or stuck roots by nudging.
            limit = 1.0 + np.abs(z)
            too_big = np.abs(corr) > limit
            corr = np.where(too_big, corr * (limit / np.abs(corr)), corr)
            corr = np.where(deriv_dead | collided.any(axis=2),
                            1e-6 * limit * np.exp(1j * GUESS_PHASE), corr)
            corr = np.where(wild, 0.5 * z, corr)
            z = z - np.where(done_root, 0.0, corr)
        else:
            p = _horner_rows(rows, z)
            resid = np.abs(p)
            converged = ((resid <= targets(z)) & np.isfinite(resid)).all(axis=1)
    return z, resid, converged
