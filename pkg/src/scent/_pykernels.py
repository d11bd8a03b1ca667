"""Pure numpy implementations of the optimizer inner loops.

These are the fallback for :mod:`scent._ckernels` and the reference the
compiled versions are tested against.
"""
from __future__ import annotations

import numpy as np


def pair_rows(d: int):
    """Upper-triangle index pairs (m, n), m < n, in row-major order."""
    return np.triu_indices(d, 1)


def phase_residual_jac(theta, p, target):
    """Residual and Jacobian of the phase-ensemble fit.

    The model is ``M_mn = sum_k p_k exp(i(theta_km - theta_kn))``; residual
    rows are the real parts of ``M_mn - target_mn`` for m < n followed by the
    imaginary parts.

    Returns
    -------
    r : (2P,) float
    jac_theta : (2P, K, d) float
    jac_p : (2P, K) float
    """
    theta = np.asarray(theta, dtype=float)
    p = np.asarray(p, dtype=float)
    K, d = theta.shape
    mi, ni = pair_rows(d)
    P = mi.size
    ph = np.exp(1j * (theta[:, mi] - theta[:, ni]))  # (K, P)
    model = p @ ph
    diff = model - np.asarray(target)[mi, ni]
    r = np.concatenate([diff.real, diff.imag])
    dz = 1j * p[:, None] * ph  # d M_p / d theta_{k,m}, (K, P)
    jt = np.zeros((2 * P, K, d))
    rows = np.arange(P)
    for k in range(K):
        jt[rows, k, mi] += dz[k].real
        jt[rows, k, ni] -= dz[k].real
        jt[P + rows, k, mi] += dz[k].imag
        jt[P + rows, k, ni] -= dz[k].imag
    jp = np.concatenate([ph.real.T, ph.imag.T])
    return r, jt, jp


def mixture_state(psi, q):
    """``sum_j q_j |psi_j><psi_j|`` for rows psi_j."""
    psi = np.asarray(psi)
    return (psi.T * q) @ psi.conj()


def separable_forward(x, M, da, db):
    """Unpack oracle parameters and assemble the product-state mixture.

    ``x`` holds real and imaginary parts of M unnormalized local vectors on
    each side followed by M softmax logits.

    Returns
    -------
    sigma : (D, D) complex
    cache : tuple
        ``(a, b, na, nb, q)`` for :func:`separable_backward`.
    """
    n1 = 2 * M * da
    n2 = n1 + 2 * M * db
    xa = x[:n1].reshape(2, M, da)
    xb = x[n1:n2].reshape(2, M, db)
    xa = xa[0] + 1j * xa[1]
    xb = xb[0] + 1j * xb[1]
    na = np.linalg.norm(xa, axis=1)
    nb = np.linalg.norm(xb, axis=1)
    a = xa / na[:, None]
    b = xb / nb[:, None]
    w = x[n2:]
    q = np.exp(w - w.max())
    q /= q.sum()
    psi = np.einsum("ja,jb->jab", a, b).reshape(M, da * db)
    return mixture_state(psi, q), (a, b, na, nb, q)


def separable_backward(g, cache):
    """Gradient of ``f`` w.r.t. the parameters of :func:`separable_forward`.

    ``g`` is Hermitian with ``df = Re tr(g dsigma)``.
    """
    a, b, na, nb, q = cache
    M, da = a.shape
    db = b.shape[1]
    psi = np.einsum("ja,jb->jab", a, b).reshape(M, da * db)
    gp = psi @ np.asarray(g).T
    gq = np.real(np.einsum("jd,jd->j", psi.conj(), gp))
    gm = (2.0 * q[:, None] * gp).reshape(M, da, db)
    ga = np.einsum("jab,jb->ja", gm, b.conj())
    gb = np.einsum("jab,ja->jb", gm, a.conj())
    ga = (ga - a * np.real(np.sum(a.conj() * ga, axis=1))[:, None]) / na[:, None]
    gb = (gb - b * np.real(np.sum(b.conj() * gb, axis=1))[:, None]) / nb[:, None]
    gw = q * (gq - q @ gq)
    return np.concatenate([ga.real.ravel(), ga.imag.ravel(), gb.real.ravel(), gb.imag.ravel(), gw])
