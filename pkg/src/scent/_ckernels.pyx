# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the optimizer inner loops in :mod:`scent._pykernels`."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, exp, sin, sqrt

cnp.import_array()


def phase_residual_jac(theta, p, target):
    cdef double[:, ::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[::1] pw = np.ascontiguousarray(p, dtype=np.float64)
    cdef double complex[:, ::1] tg = np.ascontiguousarray(target, dtype=np.complex128)
    cdef Py_ssize_t K = th.shape[0], d = th.shape[1]
    cdef Py_ssize_t P = d * (d - 1) // 2
    r_arr = np.zeros(2 * P)
    jt_arr = np.zeros((2 * P, K, d))
    jp_arr = np.zeros((2 * P, K))
    cdef double[::1] r = r_arr
    cdef double[:, :, ::1] jt = jt_arr
    cdef double[:, ::1] jp = jp_arr
    cdef Py_ssize_t m, n, k, row = 0
    cdef double c, s, re, im
    for m in range(d):
        for n in range(m + 1, d):
            re = 0.0
            im = 0.0
            for k in range(K):
                c = cos(th[k, m] - th[k, n])
                s = sin(th[k, m] - th[k, n])
                re += pw[k] * c
                im += pw[k] * s
                jp[row, k] = c
                jp[P + row, k] = s
                # d/dtheta of p (c + i s) is p (-s + i c)
                jt[row, k, m] -= pw[k] * s
                jt[row, k, n] += pw[k] * s
                jt[P + row, k, m] += pw[k] * c
                jt[P + row, k, n] -= pw[k] * c
            r[row] = re - tg[m, n].real
            r[P + row] = im - tg[m, n].imag
            row += 1
    return r_arr, jt_arr, jp_arr


def mixture_state(psi, q):
    cdef double complex[:, ::1] ps = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef double[::1] qw = np.ascontiguousarray(q, dtype=np.float64)
    cdef Py_ssize_t M = ps.shape[0], D = ps.shape[1]
    out_arr = np.zeros((D, D), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t j, a, b
    cdef double complex x
    for j in range(M):
        for a in range(D):
            x = qw[j] * ps[j, a]
            for b in range(a, D):
                out[a, b] += x * ps[j, b].conjugate()
    for a in range(D):
        for b in range(a + 1, D):
            out[b, a] = out[a, b].conjugate()
    return out_arr


def separable_forward(x, Py_ssize_t M, Py_ssize_t da, Py_ssize_t db):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t D = da * db
    cdef Py_ssize_t oa = 0, oai = M * da, ob = 2 * M * da, obi = 2 * M * da + M * db
    cdef Py_ssize_t ow = 2 * M * da + 2 * M * db
    a_arr = np.empty((M, da), dtype=np.complex128)
    b_arr = np.empty((M, db), dtype=np.complex128)
    na_arr = np.empty(M)
    nb_arr = np.empty(M)
    q_arr = np.empty(M)
    sig_arr = np.zeros((D, D), dtype=np.complex128)
    psi_arr = np.empty(D, dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] b = b_arr
    cdef double[::1] na = na_arr
    cdef double[::1] nb = nb_arr
    cdef double[::1] q = q_arr
    cdef double complex[:, ::1] sig = sig_arr
    cdef double complex[::1] psi = psi_arr
    cdef Py_ssize_t j, al, be, u, v
    cdef double s, wmax, qs
    cdef double complex x_
    wmax = xv[ow]
    for j in range(1, M):
        if xv[ow + j] > wmax:
            wmax = xv[ow + j]
    qs = 0.0
    for j in range(M):
        q[j] = exp(xv[ow + j] - wmax)
        qs += q[j]
    for j in range(M):
        q[j] /= qs
        s = 0.0
        for al in range(da):
            s += xv[oa + j * da + al] ** 2 + xv[oai + j * da + al] ** 2
        na[j] = sqrt(s)
        for al in range(da):
            a[j, al] = (xv[oa + j * da + al] + 1j * xv[oai + j * da + al]) / na[j]
        s = 0.0
        for be in range(db):
            s += xv[ob + j * db + be] ** 2 + xv[obi + j * db + be] ** 2
        nb[j] = sqrt(s)
        for be in range(db):
            b[j, be] = (xv[ob + j * db + be] + 1j * xv[obi + j * db + be]) / nb[j]
        for al in range(da):
            for be in range(db):
                psi[al * db + be] = a[j, al] * b[j, be]
        for u in range(D):
            x_ = q[j] * psi[u]
            for v in range(u, D):
                sig[u, v] = sig[u, v] + x_ * psi[v].conjugate()
    for u in range(D):
        for v in range(u + 1, D):
            sig[v, u] = sig[u, v].conjugate()
    return sig_arr, (a_arr, b_arr, na_arr, nb_arr, q_arr)


def separable_backward(g, cache):
    a_arr, b_arr, na_arr, nb_arr, q_arr = cache
    cdef double complex[:, ::1] gm = np.ascontiguousarray(g, dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] b = b_arr
    cdef double[::1] na = na_arr
    cdef double[::1] nb = nb_arr
    cdef double[::1] q = q_arr
    cdef Py_ssize_t M = a.shape[0], da = a.shape[1], db = b.shape[1]
    cdef Py_ssize_t D = da * db
    cdef Py_ssize_t oai = M * da, ob = 2 * M * da, obi = 2 * M * da + M * db
    cdef Py_ssize_t ow = 2 * M * da + 2 * M * db
    out_arr = np.empty(ow + M)
    cdef double[::1] out = out_arr
    gq_arr = np.empty(M)
    cdef double[::1] gq = gq_arr
    psi_arr = np.empty(D, dtype=np.complex128)
    gp_arr = np.empty(D, dtype=np.complex128)
    ga_arr = np.empty(da, dtype=np.complex128)
    gb_arr = np.empty(db, dtype=np.complex128)
    cdef double complex[::1] psi = psi_arr
    cdef double complex[::1] gp = gp_arr
    cdef double complex[::1] ga = ga_arr
    cdef double complex[::1] gb = gb_arr
    cdef Py_ssize_t j, al, be, u, v
    cdef double complex acc, tot
    cdef double c, qg
    for j in range(M):
        for al in range(da):
            for be in range(db):
                psi[al * db + be] = a[j, al] * b[j, be]
        tot = 0.0
        for u in range(D):
            acc = 0.0
            for v in range(D):
                acc = acc + gm[u, v] * psi[v]
            tot = tot + psi[u].conjugate() * acc
            gp[u] = 2.0 * q[j] * acc
        gq[j] = tot.real
        for al in range(da):
            acc = 0.0
            for be in range(db):
                acc = acc + gp[al * db + be] * b[j, be].conjugate()
            ga[al] = acc
        for be in range(db):
            acc = 0.0
            for al in range(da):
                acc = acc + gp[al * db + be] * a[j, al].conjugate()
            gb[be] = acc
        c = 0.0
        for al in range(da):
            c += (a[j, al].conjugate() * ga[al]).real
        for al in range(da):
            acc = (ga[al] - c * a[j, al]) / na[j]
            out[j * da + al] = acc.real
            out[oai + j * da + al] = acc.imag
        c = 0.0
        for be in range(db):
            c += (b[j, be].conjugate() * gb[be]).real
        for be in range(db):
            acc = (gb[be] - c * b[j, be]) / nb[j]
            out[ob + j * db + be] = acc.real
            out[obi + j * db + be] = acc.imag
    qg = 0.0
    for j in range(M):
        qg += q[j] * gq[j]
    for j in range(M):
        out[ow + j] = q[j] * (gq[j] - qg)
    return out_arr
