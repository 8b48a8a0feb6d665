# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Horner evaluation, escape iteration, Aberth solves.

Mirrors polydyn._kernels_py exactly; see that module for the contracts.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx

BACKEND = "compiled"

GUESS_PHASE = 0.7390851332151607
cdef double _GUESS_PHASE = 0.7390851332151607
cdef double _TINY = 1e-300


cdef inline double _cabs(cplx z) nogil:
    cdef double x = z.real
    cdef double y = z.imag
    return (x * x + y * y) ** 0.5


cdef inline cplx _horner(const cplx* a, Py_ssize_t n, cplx z) nogil:
    cdef cplx out = a[n - 1]
    cdef Py_ssize_t k
    for k in range(n - 2, -1, -1):
        out = out * z + a[k]
    return out


cdef inline double _horner_abs(const double* a, Py_ssize_t n, double x) nogil:
    cdef double out = a[n - 1]
    cdef Py_ssize_t k
    for k in range(n - 2, -1, -1):
        out = out * x + a[k]
    return out


def horner_many(coeffs, zs):
    """Evaluate sum_k a_k z^k at each z (any array shape)."""
    cdef cnp.ndarray[cplx, ndim=1] a = np.ascontiguousarray(coeffs, dtype=np.complex128)
    zarr = np.ascontiguousarray(zs, dtype=np.complex128)
    shape = zarr.shape
    cdef cnp.ndarray[cplx, ndim=1] flat = zarr.ravel()
    cdef cnp.ndarray[cplx, ndim=1] out = np.empty(flat.shape[0], dtype=np.complex128)
    cdef Py_ssize_t i, n = a.shape[0]
    for i in range(flat.shape[0]):
        out[i] = _horner(&a[0], n, flat[i])
    return out.reshape(shape)


def iterate_escape(coeffs, zs, n, radius):
    """Apply the polynomial n times with escape detection.

    Returns (values, steps); steps[i] is the first iterate index with
    |z| > radius, or -1 for a bounded orbit.
    """
    cdef cnp.ndarray[cplx, ndim=1] a = np.ascontiguousarray(coeffs, dtype=np.complex128)
    zarr = np.ascontiguousarray(zs, dtype=np.complex128)
    shape = zarr.shape
    cdef cnp.ndarray[cplx, ndim=1] z = zarr.ravel().copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] steps = np.full(z.shape[0], -1, dtype=np.int64)
    cdef Py_ssize_t i, k, m = z.shape[0], nc = a.shape[0]
    cdef int nn = int(n)
    cdef double r = float(radius)
    cdef cplx v
    for i in range(m):
        v = z[i]
        for k in range(1, nn + 1):
            v = _horner(&a[0], nc, v)
            if not (_cabs(v) <= r):
                steps[i] = k
                break
        z[i] = v
    return z.reshape(shape), steps.reshape(shape)


def aberth_batch(coeffs, ws, tol, max_iter):
    """Simultaneously solve P(z) = w for every w in ws.

    Returns (roots (W, d), residuals (W, d), converged (W,) bool).
    Same contract as the python backend: the per-root residual target is
    tol * max(coefficient scale, local evaluation scale).
    """
    cdef cnp.ndarray[cplx, ndim=1] a = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] warr = np.ascontiguousarray(
        np.asarray(ws, dtype=np.complex128).ravel()
    )
    cdef Py_ssize_t d = a.shape[0] - 1
    cdef Py_ssize_t nw = warr.shape[0]
    if d < 1:
        raise ValueError("degree must be at least 1")
    cdef cnp.ndarray[cplx, ndim=2] roots = np.empty((nw, d), dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] resid = np.zeros((nw, d), dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] conv = np.zeros(nw, dtype=np.uint8)
    if nw == 0:
        return roots, resid, conv.view(np.bool_)
    cdef Py_ssize_t i, j, k, it
    cdef double tol_c = float(tol)
    cdef int max_it = int(max_iter)

    if d == 1:
        for i in range(nw):
            roots[i, 0] = (warr[i] - a[0]) / a[1]
            conv[i] = 1
        return roots, resid, conv.view(np.bool_)

    cdef cnp.ndarray[cplx, ndim=1] da = np.empty(d, dtype=np.complex128)
    for k in range(d):
        da[k] = a[k + 1] * (k + 1)

    cdef double coeff_mag = 0.0, lead = _cabs(a[d]), inner_max = 0.0
    for k in range(1, d + 1):
        if _cabs(a[k]) > coeff_mag:
            coeff_mag = _cabs(a[k])
    for k in range(1, d):
        if _cabs(a[k]) / lead > inner_max:
            inner_max = _cabs(a[k]) / lead

    cdef cnp.ndarray[cplx, ndim=1] z = np.empty(d, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] work = a.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] abs_work = np.abs(a)
    cdef cplx c0, p, dp, newton, s, diffz, corr, denom
    cdef double scale, target, guess_r, ang, eval_scale
    cdef bint all_done, root_ok

    for i in range(nw):
        c0 = a[0] - warr[i]
        work[0] = c0
        abs_work[0] = _cabs(c0)
        scale = coeff_mag if coeff_mag > _cabs(c0) else _cabs(c0)
        guess_r = _cabs(c0) / lead
        if inner_max > guess_r:
            guess_r = inner_max
        guess_r += 1.0
        for j in range(d):
            ang = 2.0 * np.pi * j / d + _GUESS_PHASE
            z[j] = guess_r * (np.cos(ang) + 1j * np.sin(ang))
        for it in range(max_it):
            all_done = True
            for j in range(d):
                p = _horner(&work[0], d + 1, z[j])
                resid[i, j] = _cabs(p)
                eval_scale = _horner_abs(&abs_work[0], d + 1, _cabs(z[j]))
                target = tol_c * (scale if scale > eval_scale else eval_scale)
                if resid[i, j] <= target and resid[i, j] == resid[i, j] \
                        and resid[i, j] != float("inf"):
                    continue
                all_done = False
                limit = 1.0 + _cabs(z[j])
                if not (resid[i, j] == resid[i, j] and resid[i, j] != float("inf")):
                    # Overflowed stray: pull it back toward the origin.
                    z[j] = 0.5 * z[j]
                    continue
                dp = _horner(&da[0], d, z[j])
                if _cabs(dp) == 0.0:
                    # Dead derivative: nudge and retry next sweep.
                    z[j] = z[j] + 1e-6 * limit * (
                        np.cos(_GUESS_PHASE) + 1j * np.sin(_GUESS_PHASE)
                    )
                    continue
                newton = p / dp
                s = 0
                for k in range(d):
                    if k != j:
                        diffz = z[j] - z[k]
                        if _cabs(diffz) < _TINY:
                            diffz = _TINY
                        s = s + 1.0 / diffz
                denom = 1.0 - newton * s
                if _cabs(denom) < 1e-12:
                    corr = newton  # fall back to the plain Newton step
                else:
                    corr = newton / denom
                if _cabs(corr) > limit:
                    corr = corr * (limit / _cabs(corr))
                z[j] = z[j] - corr
            if all_done:
                break
        root_ok = True
        for j in range(d):
            p = _horner(&work[0], d + 1, z[j])
            resid[i, j] = _cabs(p)
            eval_scale = _horner_abs(&abs_work[0], d + 1, _cabs(z[j]))
            target = tol_c * (scale if scale > eval_scale else eval_scale)
            if not (resid[i, j] <= target):
                root_ok = False
            roots[i, j] = z[j]
        conv[i] = 1 if root_ok else 0
    return roots, resid, conv.view(np.bool_)
