"""Dense eigensolvers used to check finite-lattice spectra.

``jacobi_eigh`` diagonalizes complex Hermitian matrices by cyclic Jacobi
rotations; rotations on disjoint index pairs are applied together
(round-robin ordering), one numpy update per round.  ``qr_eigvals`` reduces a
general complex matrix to Hessenberg form with Householder reflections and
runs single-shift QR with Wilkinson shifts and deflation.
"""
from __future__ import annotations

import numpy as np

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
QR_ITERATIONS_PER_DIM = 30
QR_MAX_DIM = 512
_EPS = np.finfo(float).eps


class ConvergenceError(RuntimeError):
    """An iterative eigensolver hit its iteration cap."""


def _round_robin_orders(m: int):
    """Index orders, one per round, whose consecutive pairs (0,1), (2,3), ...
    together cover every unordered pair of ``range(m)`` exactly once (m even)."""
    players = list(range(m))
    orders = []
    for _ in range(m - 1):
        order = []
        for i in range(m // 2):
            order += [players[i], players[m - 1 - i]]
        orders.append(np.array(order))
        players = [players[0], players[-1]] + players[1:-1]
    return orders


def off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _rotate_pairs(a: np.ndarray, v: np.ndarray | None) -> None:
    """One Jacobi rotation on every pair (2i, 2i+1) of ``a`` (in place)."""
    m = a.shape[0]
    ev = np.arange(0, m, 2)
    app, aqq, apq = a[ev, ev].real, a[ev + 1, ev + 1].real, a[ev, ev + 1]
    r = np.abs(apq)
    live = r > 0
    safe_r = np.where(live, r, 1.0)
    phase = np.where(live, apq / safe_r, 1.0)
    tau = (aqq - app) / (2.0 * safe_r)
    t = np.where(live, np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # G = [[c, s], [-s e^{-i alpha}, c e^{-i alpha}]] on (p, q); A <- G^H A G
    g_qp = -s * np.conj(phase)
    g_qq = c * np.conj(phase)
    cols = a.reshape(m, m // 2, 2)
    col_p = cols[:, :, 0].copy()
    col_q = cols[:, :, 1]
    cols[:, :, 0] = col_p * c + col_q * g_qp
    cols[:, :, 1] = col_p * s + col_q * g_qq
    rows = a.reshape(m // 2, 2, m)
    row_p = rows[:, 0, :].copy()
    row_q = rows[:, 1, :]
    rows[:, 0, :] = c[:, None] * row_p + np.conj(g_qp)[:, None] * row_q
    rows[:, 1, :] = s[:, None] * row_p + np.conj(g_qq)[:, None] * row_q
    a[ev, ev + 1] = 0.0
    a[ev + 1, ev] = 0.0
    if v is not None:
        vcols = v.reshape(v.shape[0], m // 2, 2)
        vp = vcols[:, :, 0].copy()
        vq = vcols[:, :, 1]
        vcols[:, :, 0] = vp * c + vq * g_qp
        vcols[:, :, 1] = vp * s + vq * g_qq


def jacobi_eigh(h: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS,
                vectors: bool = True):
    """Eigenvalues (ascending) and optionally eigenvectors of a Hermitian matrix.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||h||_F``; ``ConvergenceError`` after ``max_sweeps``.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    scale = np.linalg.norm(h)
    if n < 2 or scale == 0:
        w = np.real(np.diag(h)).copy()
        order = np.argsort(w, kind="stable")
        vecs = np.eye(n, dtype=complex)[:, order]
        return (w[order], vecs) if vectors else w[order]

    m = n + (n % 2)
    a = np.zeros((m, m), dtype=complex)
    a[:n, :n] = h
    v = np.eye(m, dtype=complex) if vectors else None
    orders = _round_robin_orders(m)
    current = np.arange(m)
    position = np.empty(m, dtype=int)
    converged = False
    for _ in range(max_sweeps):
        if off_norm(a) < tol * scale:
            converged = True
            break
        for order in orders:
            position[current] = np.arange(m)
            rel = position[order]
            a = a[np.ix_(rel, rel)]
            if vectors:
                v = v[:, rel]
            current = order
            _rotate_pairs(a, v)
    if not converged and off_norm(a) >= tol * scale:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    keep = current < n
    w = np.real(np.diag(a))[keep]
    order = np.argsort(w, kind="stable")
    if vectors:
        return w[order], v[:n, keep][:, order]
    return w[order]


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Upper Hessenberg matrix unitarily similar to ``a`` (Householder)."""
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    for j in range(n - 2):
        x = h[j + 1:, j]
        alpha = np.linalg.norm(x)
        if alpha == 0:
            continue
        lead = x[0]
        phase = lead / abs(lead) if lead != 0 else 1.0
        u = x.copy()
        u[0] += phase * alpha
        u /= np.linalg.norm(u)
        h[j + 1:, j:] -= 2.0 * np.outer(u, u.conj() @ h[j + 1:, j:])
        h[:, j + 1:] -= 2.0 * np.outer(h[:, j + 1:] @ u, u.conj())
        h[j + 2:, j] = 0.0
    return h


def _eig2(a, b, c, d):
    half_tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c + 0j)
    return half_tr + disc, half_tr - disc


def _qr_step(w: np.ndarray, shift: complex) -> None:
    m = w.shape[0]
    idx = np.arange(m)
    w[idx, idx] -= shift
    rots = []
    for j in range(m - 1):
        x, y = w[j, j], w[j + 1, j]
        r = np.hypot(abs(x), abs(y))
        if r == 0:
            c, s = 1.0, 0.0
        elif x == 0:
            c, s = 0.0, np.conj(y) / abs(y)
        else:
            c = abs(x) / r
            s = (x / abs(x)) * np.conj(y) / r
        rows = w[j:j + 2, j:]
        top = c * rows[0] + s * rows[1]
        rows[1] = -np.conj(s) * rows[0] + c * rows[1]
        rows[0] = top
        w[j + 1, j] = 0.0
        rots.append((c, s))
    for j, (c, s) in enumerate(rots):
        cols = w[:j + 2, j:j + 2]
        left = cols[:, 0] * c + cols[:, 1] * np.conj(s)
        cols[:, 1] = -cols[:, 0] * s + cols[:, 1] * c
        cols[:, 0] = left
    w[idx, idx] += shift


def qr_eigvals(a: np.ndarray, max_iter: int | None = None) -> np.ndarray:
    """All eigenvalues of a general complex matrix, unordered.

    Raises ``ConvergenceError`` if more than ``max_iter`` (default 30 n)
    QR steps are needed; no partial spectrum is returned in that case.
    """
    h = hessenberg(a)
    n = h.shape[0]
    max_iter = QR_ITERATIONS_PER_DIM * max(n, 1) if max_iter is None else max_iter
    norm = max(np.max(np.abs(h)) if n else 0.0, np.finfo(float).tiny)
    eig = np.empty(n, dtype=complex)
    hi = n - 1
    total = 0
    since_deflation = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            scale = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if abs(h[lo, lo - 1]) <= _EPS * (scale if scale > 0 else norm):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        if lo == hi - 1:
            eig[hi - 1], eig[hi] = _eig2(h[lo, lo], h[lo, hi], h[hi, lo], h[hi, hi])
            hi -= 2
            since_deflation = 0
            continue
        total += 1
        since_deflation += 1
        if total > max_iter:
            raise ConvergenceError(f"QR iteration did not converge in {max_iter} steps")
        if since_deflation % 11 == 10:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            mu1, mu2 = _eig2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
            shift = mu1 if abs(mu1 - h[hi, hi]) <= abs(mu2 - h[hi, hi]) else mu2
        _qr_step(h[lo:hi + 1, lo:hi + 1], shift)
    return eig


def charpoly_newton_step(a: np.ndarray, lam: complex) -> float:
    """|p(lam) / p'(lam)| for the characteristic polynomial p of ``a``.

    p'/p = -tr((a - lam)^-1); an exactly singular shift gives 0.
    """
    n = a.shape[0]
    try:
        resolvent = np.linalg.inv(a - lam * np.eye(n))
    except np.linalg.LinAlgError:
        return 0.0
    tr = np.trace(resolvent)
    return float("inf") if tr == 0 else float(1.0 / abs(tr))
