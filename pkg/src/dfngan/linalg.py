"""Dense real matrix kernels.

Hessenberg reduction and the Francis implicit double-shift QR iteration
produce a real Schur form ``X = Q T Q^T`` where ``T`` is quasi-upper
triangular (1x1 blocks for real eigenvalues, 2x2 blocks for complex
conjugate pairs). Also hosts the power iteration used by spectral clamping
and the 2x2 mean pooling used by the fast DFN surrogate.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_matrix, check_square
from .exceptions import NoConvergence, TooSmall, ZeroMatrix

__all__ = [
    "SchurForm",
    "hessenberg_reduce",
    "real_schur",
    "top_singular_triplet",
    "downsample2",
]


@dataclass(frozen=True)
class SchurForm:
    """Real Schur decomposition ``x = q @ t @ q.T``.

    Attributes
    ----------
    q : ndarray of shape (n, n)
        Orthogonal Schur vectors.
    t : ndarray of shape (n, n)
        Quasi-upper-triangular factor.
    eigenvalues : ndarray of shape (n,), complex
        Eigenvalues in diagonal-block order.
    """

    q: np.ndarray
    t: np.ndarray
    eigenvalues: np.ndarray

    def blocks(self):
        """Return ``(start, size)`` for each diagonal block of ``t``."""
        n = self.t.shape[0]
        out = []
        i = 0
        while i < n:
            if i + 1 < n and self.t[i + 1, i] != 0.0:
                out.append((i, 2))
                i += 2
            else:
                out.append((i, 1))
                i += 1
        return out


def _householder(x):
    """Reflector ``(v, beta)`` with ``(I - beta v v^T) x = alpha e1``.

    Returns ``None`` when ``x`` is already a multiple of ``e1``.
    """
    sigma = float(np.dot(x[1:], x[1:]))
    if sigma == 0.0:
        return None
    norm = np.sqrt(x[0] * x[0] + sigma)
    alpha = -norm if x[0] >= 0 else norm
    v = np.array(x, dtype=np.float64)
    v[0] -= alpha
    beta = 2.0 / float(np.dot(v, v))
    return v, beta


def hessenberg_reduce(x):
    """Orthogonal reduction to upper Hessenberg form.

    Returns ``(q, h)`` with ``q.T @ x @ q == h`` and ``h`` zero below the
    first subdiagonal.
    """
    h = check_square(x).copy()
    n = h.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        refl = _householder(h[k + 1:, k])
        if refl is None:
            continue
        v, beta = refl
        h[k + 1:, k:] -= beta * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= beta * np.outer(h[:, k + 1:] @ v, v)
        q[:, k + 1:] -= beta * np.outer(q[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return q, h


def _block_eigenvalues(a, b, c, d):
    """Eigenvalues of ``[[a, b], [c, d]]`` without cancellation."""
    half_tr = 0.5 * (a + d)
    p = 0.5 * (a - d)
    disc = p * p + b * c
    if disc < 0.0:
        im = np.sqrt(-disc)
        return complex(half_tr, im), complex(half_tr, -im)
    root = np.sqrt(disc)
    # larger-magnitude root first, the other from the determinant
    l1 = half_tr + np.copysign(root, half_tr) if half_tr != 0.0 else root
    det = a * d - b * c
    l2 = det / l1 if l1 != 0.0 else half_tr - root
    return complex(l1), complex(l2)


def _split_real_block(h, q, p):
    """Triangularize a 2x2 diagonal block at ``p`` that has real eigenvalues.

    Returns False (block left intact) when the eigenvalues are complex.
    """
    a, b, c, d = h[p, p], h[p, p + 1], h[p + 1, p], h[p + 1, p + 1]
    l1, _ = _block_eigenvalues(a, b, c, d)
    if l1.imag != 0.0:
        return False
    lam = l1.real
    # eigenvector of the block for lam; pick the better conditioned form
    v1 = np.array([b, lam - a])
    v2 = np.array([lam - d, c])
    v = v1 if np.dot(v1, v1) >= np.dot(v2, v2) else v2
    nv = np.hypot(v[0], v[1])
    if nv == 0.0:
        h[p + 1, p] = 0.0
        return True
    cs, sn = v[0] / nv, v[1] / nv
    g = np.array([[cs, -sn], [sn, cs]])
    h[p:p + 2, p:] = g.T @ h[p:p + 2, p:]
    h[:p + 2, p:p + 2] = h[:p + 2, p:p + 2] @ g
    q[:, p:p + 2] = q[:, p:p + 2] @ g
    h[p + 1, p] = 0.0
    return True


def _francis_step(h, q, lo, hi, exceptional):
    """One implicit double-shift QR sweep on the active window ``lo..hi``."""
    if exceptional:
        # ad-hoc shift to break cycles (EISPACK hqr convention)
        s = abs(h[hi, hi - 1]) + abs(h[hi - 1, hi - 2] if hi - 2 >= lo else 0.0)
        shift_sum = 1.5 * s
        shift_prod = s * s
    else:
        shift_sum = h[hi - 1, hi - 1] + h[hi, hi]
        shift_prod = h[hi - 1, hi - 1] * h[hi, hi] - h[hi - 1, hi] * h[hi, hi - 1]

    x = h[lo, lo] * h[lo, lo] + h[lo, lo + 1] * h[lo + 1, lo] - shift_sum * h[lo, lo] + shift_prod
    y = h[lo + 1, lo] * (h[lo, lo] + h[lo + 1, lo + 1] - shift_sum)
    z = h[lo + 1, lo] * h[lo + 2, lo + 1]
    for k in range(lo, hi - 1):
        refl = _householder(np.array([x, y, z]))
        if refl is not None:
            v, beta = refl
            r = max(lo, k - 1)
            h[k:k + 3, r:] -= beta * np.outer(v, v @ h[k:k + 3, r:])
            top = min(k + 3, hi) + 1
            h[:top, k:k + 3] -= beta * np.outer(h[:top, k:k + 3] @ v, v)
            q[:, k:k + 3] -= beta * np.outer(q[:, k:k + 3] @ v, v)
            if k > lo:
                h[k + 1:k + 3, k - 1] = 0.0
        x = h[k + 1, k]
        y = h[k + 2, k]
        if k < hi - 2:
            z = h[k + 3, k]
    refl = _householder(np.array([x, y]))
    if refl is not None:
        v, beta = refl
        h[hi - 1:hi + 1, hi - 2:] -= beta * np.outer(v, v @ h[hi - 1:hi + 1, hi - 2:])
        h[:hi + 1, hi - 1:hi + 1] -= beta * np.outer(h[:hi + 1, hi - 1:hi + 1] @ v, v)
        q[:, hi - 1:hi + 1] -= beta * np.outer(q[:, hi - 1:hi + 1] @ v, v)
        h[hi, hi - 2] = 0.0


def real_schur(x, tol=1e-12, max_sweeps=None):
    """Real Schur decomposition by Francis double-shift QR.

    Parameters
    ----------
    x : array_like of shape (n, n)
    tol : float
        Relative deflation threshold: ``h[i+1, i]`` is zeroed once
        ``|h[i+1, i]| <= tol * (|h[i, i]| + |h[i+1, i+1]|)``, or once it
        falls below machine epsilon times the 1-norm of ``h``.
    max_sweeps : int, optional
        Total QR sweeps allowed; defaults to ``30 * n``.

    Returns
    -------
    SchurForm

    Raises
    ------
    NoConvergence
        If a subdiagonal entry fails to deflate in time. ``err.index`` is
        the stuck row.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = check_square(x)
    n = a.shape[0]
    if max_sweeps is None:
        max_sweeps = 30 * n
    # power-of-two rescale (exact) keeps the shift arithmetic clear of
    # underflow and overflow for very small or very large entries
    peak = np.max(np.abs(a))
    exp2 = math.frexp(peak)[1] if peak > 0 else 0
    q, h = hessenberg_reduce(np.ldexp(a, -exp2))
    scale = np.abs(h).sum() or 1.0
    # entries below roundoff of the whole matrix deflate regardless of the
    # local test; otherwise tiny blocks beside O(1) ones never converge
    floor = np.finfo(np.float64).eps * scale

    sweeps = 0
    stalled = 0
    hi = n - 1
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = scale
            if abs(h[lo, lo - 1]) <= max(tol * s, floor):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            stalled = 0
            continue
        if lo == hi - 1:
            _split_real_block(h, q, lo)
            hi -= 2
            stalled = 0
            continue
        if sweeps >= max_sweeps:
            raise NoConvergence(hi, sweeps)
        stalled += 1
        sweeps += 1
        _francis_step(h, q, lo, hi, exceptional=(stalled % 10 == 0))

    t = np.triu(h, -1)
    # only genuine 2x2 blocks keep a subdiagonal entry
    i = 0
    while i < n - 1:
        if t[i + 1, i] != 0.0:
            if i + 2 < n:
                t[i + 2, i + 1] = 0.0
            i += 2
        else:
            i += 1

    eig = []
    i = 0
    while i < n:
        if i + 1 < n and t[i + 1, i] != 0.0:
            eig.extend(_block_eigenvalues(t[i, i], t[i, i + 1], t[i + 1, i], t[i + 1, i + 1]))
            i += 2
        else:
            eig.append(complex(t[i, i]))
            i += 1
    eig = np.array(eig, dtype=np.complex128)
    return SchurForm(q=q, t=np.ldexp(t, exp2), eigenvalues=eig * 2.0 ** exp2)


def top_singular_triplet(x, iters=30):
    """Largest singular value and vectors by power iteration on ``x^T x``.

    The start vector is fixed, so results are deterministic. ``u0`` is
    formed as ``x @ v0 / sigma0``, hence ``x @ v0 == sigma0 * u0`` holds
    to rounding.

    Returns
    -------
    sigma0 : float
    u0 : ndarray of shape (rows,)
    v0 : ndarray of shape (cols,)
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    a = check_matrix(x)
    if not np.any(a):
        raise ZeroMatrix("power iteration needs a nonzero matrix")
    v = np.random.default_rng(0).standard_normal(a.shape[1])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = a.T @ (a @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # start vector landed in the null space; restart on the heaviest column
            v = np.zeros(a.shape[1])
            v[np.argmax(np.sum(a * a, axis=0))] = 1.0
            continue
        v = w / nw
    u = a @ v
    sigma = float(np.linalg.norm(u))
    return sigma, u / sigma, v


def downsample2(x, phase_row=0, phase_col=0):
    """Mean-pool 2x2 cells starting at the given row/column phase.

    Trailing rows/columns that do not fill a full cell are dropped, so the
    output is ``floor((rows - phase_row) / 2) x floor((cols - phase_col) / 2)``.
    """
    if phase_row not in (0, 1) or phase_col not in (0, 1):
        raise ValueError("phases must be 0 or 1")
    a = check_matrix(x)
    rows, cols = a.shape
    if rows < 2 or cols < 2:
        raise TooSmall(f"downsample2 needs at least 2x2, got {rows}x{cols}")
    kr = (rows - phase_row) // 2
    kc = (cols - phase_col) // 2
    if kr < 1 or kc < 1:
        raise TooSmall(f"phase ({phase_row}, {phase_col}) leaves no full cell in {rows}x{cols}")
    s = a[phase_row:phase_row + 2 * kr, phase_col:phase_col + 2 * kc]
    return s.reshape(kr, 2, kc, 2).mean(axis=(1, 3))
