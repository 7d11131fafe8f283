# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled Monte Carlo trial chunk.

Per-trial channel synthesis, interference-aware MMSE or zero-forcing
equalization via Gaussian elimination with partial pivoting, hard
decisions and integer error accumulation. Consumes the same pre-drawn
random inputs as np_backend.run_chunk and returns the same accumulators.
"""

from libc.stdlib cimport free, malloc

ctypedef double complex cplx


cdef inline double _abs2(cplx v) noexcept nogil:
    return v.real * v.real + v.imag * v.imag


cdef int _solve_inplace(cplx* a, cplx* b, int n, int m) noexcept nogil:
    """Solve a @ x = b in place (a is n x n, b is n x m, row major).

    Partial-pivoted Gaussian elimination; the solution overwrites b.
    Returns 0 on success, -1 when a pivot vanishes (singular system).
    """
    cdef int i, j, k, piv
    cdef double best, mag
    cdef cplx factor, tmp
    for k in range(n):
        piv = k
        best = _abs2(a[k * n + k])
        for i in range(k + 1, n):
            mag = _abs2(a[i * n + k])
            if mag > best:
                best = mag
                piv = i
        if best == 0.0:
            return -1
        if piv != k:
            for j in range(k, n):
                tmp = a[k * n + j]
                a[k * n + j] = a[piv * n + j]
                a[piv * n + j] = tmp
            for j in range(m):
                tmp = b[k * m + j]
                b[k * m + j] = b[piv * m + j]
                b[piv * m + j] = tmp
        for i in range(k + 1, n):
            factor = a[i * n + k] / a[k * n + k]
            if factor != 0:
                for j in range(k + 1, n):
                    a[i * n + j] = a[i * n + j] - factor * a[k * n + j]
                for j in range(m):
                    b[i * m + j] = b[i * m + j] - factor * b[k * m + j]
    for k in range(n - 1, -1, -1):
        for j in range(m):
            tmp = b[k * m + j]
            for i in range(k + 1, n):
                tmp = tmp - a[k * n + i] * b[i * m + j]
            b[k * m + j] = tmp / a[k * n + k]
    return 0


def run_chunk(
    cplx[:, ::1] mean,
    cplx[:, ::1] rx_sqrt,
    cplx[:, ::1] tx_sqrt,
    cplx[:, ::1] imean,
    cplx[:, ::1] irx_sqrt,
    cplx[:, ::1] itx_sqrt,
    cplx[::1] points,
    unsigned char[:, ::1] bit_table,
    int use_mmse,
    cplx[:, :, ::1] g,
    cplx[:, :, ::1] gi,
    cplx[:, ::1] isym,
    cplx[:, ::1] noise,
    long long[:, ::1] tx_idx,
):
    """Run one batch of trials; returns (sum of bit errors, sum of squares)."""
    cdef Py_ssize_t trials = g.shape[0]
    cdef int n_r = <int> g.shape[1]
    cdef int n_t = <int> g.shape[2]
    cdef int n_ti = <int> gi.shape[2]
    cdef int n_pts = <int> points.shape[0]
    cdef int rhs_cols = n_t + 1
    cdef int mx = n_t if n_t >= n_ti else n_ti

    cdef cplx* h = <cplx*> malloc(sizeof(cplx) * n_r * n_t)
    cdef cplx* tmp = <cplx*> malloc(sizeof(cplx) * n_r * mx)
    cdef cplx* hi = <cplx*> malloc(sizeof(cplx) * max(1, n_r * n_ti))
    cdef cplx* y = <cplx*> malloc(sizeof(cplx) * n_r)
    cdef cplx* r = <cplx*> malloc(sizeof(cplx) * n_r * n_r)
    cdef cplx* w = <cplx*> malloc(sizeof(cplx) * n_r * rhs_cols)
    cdef cplx* amat = <cplx*> malloc(sizeof(cplx) * n_t * n_t)
    cdef cplx* bvec = <cplx*> malloc(sizeof(cplx) * n_t)
    if not (h and tmp and hi and y and r and w and amat and bvec):
        free(h); free(tmp); free(hi); free(y); free(r); free(w); free(amat); free(bvec)
        raise MemoryError("could not allocate trial work buffers")

    cdef long long sum_err = 0
    cdef long long sum_sq = 0
    cdef long long trial_err
    cdef Py_ssize_t t
    cdef int i, j, k, best, ok
    cdef cplx acc
    cdef double dmin, d

    with nogil:
        for t in range(trials):
            # Serving channel: h = mean + rx_sqrt @ (g_t @ tx_sqrt).
            for i in range(n_r):
                for j in range(n_t):
                    acc = 0
                    for k in range(n_t):
                        acc = acc + g[t, i, k] * tx_sqrt[k, j]
                    tmp[i * mx + j] = acc
            for i in range(n_r):
                for j in range(n_t):
                    acc = mean[i, j]
                    for k in range(n_r):
                        acc = acc + rx_sqrt[i, k] * tmp[k * mx + j]
                    h[i * n_t + j] = acc

            # Received vector: y = h @ x + noise (+ interference below).
            for i in range(n_r):
                acc = noise[t, i]
                for j in range(n_t):
                    acc = acc + h[i * n_t + j] * points[tx_idx[t, j]]
                y[i] = acc

            if n_ti > 0:
                for i in range(n_r):
                    for j in range(n_ti):
                        acc = 0
                        for k in range(n_ti):
                            acc = acc + gi[t, i, k] * itx_sqrt[k, j]
                        tmp[i * mx + j] = acc
                for i in range(n_r):
                    for j in range(n_ti):
                        acc = imean[i, j]
                        for k in range(n_r):
                            acc = acc + irx_sqrt[i, k] * tmp[k * mx + j]
                        hi[i * n_ti + j] = acc
                for i in range(n_r):
                    acc = y[i]
                    for j in range(n_ti):
                        acc = acc + hi[i * n_ti + j] * isym[t, j]
                    y[i] = acc

            ok = 0
            if use_mmse and n_ti > 0:
                # R = I + hi @ hi^H, then w = R^-1 [h | y] in one solve.
                for i in range(n_r):
                    for j in range(n_r):
                        if i == j:
                            acc = 1
                        else:
                            acc = 0
                        for k in range(n_ti):
                            acc = acc + hi[i * n_ti + k] * hi[j * n_ti + k].conjugate()
                        r[i * n_r + j] = acc
                for i in range(n_r):
                    for j in range(n_t):
                        w[i * rhs_cols + j] = h[i * n_t + j]
                    w[i * rhs_cols + n_t] = y[i]
                ok = _solve_inplace(r, w, n_r, rhs_cols)
                if ok == 0:
                    # amat = h^H w_H + I, bvec = h^H w_y.
                    for i in range(n_t):
                        for j in range(n_t):
                            if i == j:
                                acc = 1
                            else:
                                acc = 0
                            for k in range(n_r):
                                acc = acc + h[k * n_t + i].conjugate() * w[k * rhs_cols + j]
                            amat[i * n_t + j] = acc
                        acc = 0
                        for k in range(n_r):
                            acc = acc + h[k * n_t + i].conjugate() * w[k * rhs_cols + n_t]
                        bvec[i] = acc
                    ok = _solve_inplace(amat, bvec, n_t, 1)
            else:
                # amat = h^H h (+ I for MMSE), bvec = h^H y.
                for i in range(n_t):
                    for j in range(n_t):
                        if use_mmse and i == j:
                            acc = 1
                        else:
                            acc = 0
                        for k in range(n_r):
                            acc = acc + h[k * n_t + i].conjugate() * h[k * n_t + j]
                        amat[i * n_t + j] = acc
                    acc = 0
                    for k in range(n_r):
                        acc = acc + h[k * n_t + i].conjugate() * y[k]
                    bvec[i] = acc
                ok = _solve_inplace(amat, bvec, n_t, 1)
            if ok != 0:
                # Singular system (measure-zero event): decide from zeros.
                for j in range(n_t):
                    bvec[j] = 0

            trial_err = 0
            for j in range(n_t):
                best = 0
                dmin = _abs2(bvec[j] - points[0])
                for k in range(1, n_pts):
                    d = _abs2(bvec[j] - points[k])
                    if d < dmin:
                        dmin = d
                        best = k
                trial_err = trial_err + bit_table[tx_idx[t, j], best]
            sum_err = sum_err + trial_err
            sum_sq = sum_sq + trial_err * trial_err

    free(h); free(tmp); free(hi); free(y); free(r); free(w); free(amat); free(bvec)
    return sum_err, sum_sq
