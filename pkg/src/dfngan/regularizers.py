"""Weight-space regularizers and the gradient of the DFN penalty.

``spectral_clamp_update`` caps the top singular value of a weight matrix.
The two orthogonal penalties push ``theta^T theta`` toward the identity
(v1) or toward a diagonal Gram matrix (v2). ``dfn_penalty_gradient``
differentiates the departure from normality of a sample with respect to
its entries, analytically through eigenvalue perturbation or by central
differences.
"""

import enum
from dataclasses import dataclass

import numpy as np

from ._validation import check_matrix, check_square
from .dfn import dfn_exact
from .exceptions import DegenerateSpectrum, ZeroMatrix
from .linalg import real_schur, top_singular_triplet

__all__ = [
    "PenaltyResult",
    "STOP_GRAD_SECOND",
    "GradientMode",
    "spectral_clamp_update",
    "orthogonal_penalty_v1",
    "orthogonal_penalty_v2",
    "dfn_penalty_gradient",
    "dfn_gradient_batch",
]

DEFAULT_BETA = 1e-4

# sentinel: clamp to the (stop-gradient) second singular value
STOP_GRAD_SECOND = "stop_grad_second"


class GradientMode(str, enum.Enum):
    ANALYTIC = "analytic"
    FINITE_DIFF = "finite_diff"


@dataclass(frozen=True)
class PenaltyResult:
    value: float
    gradient: np.ndarray


def second_singular_value(theta, power_iters=30):
    """Second singular value by deflating the top rank-1 component."""
    a = check_matrix(theta)
    s0, u0, v0 = top_singular_triplet(a, power_iters)
    rest = a - s0 * np.outer(u0, v0)
    if not np.any(np.abs(rest) > 1e-14 * s0):
        return 0.0
    return top_singular_triplet(rest, power_iters)[0]


def spectral_clamp_update(theta, sigma_clamp=STOP_GRAD_SECOND, power_iters=30):
    """Subtract ``max(0, sigma0 - sigma_clamp) * u0 v0^T`` from ``theta``.

    ``sigma_clamp`` is either a nonnegative number or ``STOP_GRAD_SECOND``,
    in which case the clamp level is the second singular value. The input
    is never modified; when nothing needs clamping the same values are
    returned in a fresh array.
    """
    a = check_matrix(theta)
    if not np.any(a):
        raise ZeroMatrix("cannot clamp an all-zero matrix")
    s0, u0, v0 = top_singular_triplet(a, power_iters)
    if isinstance(sigma_clamp, str):
        if sigma_clamp != STOP_GRAD_SECOND:
            raise ValueError(f"unknown clamp mode {sigma_clamp!r}")
        sigma_c = second_singular_value(a, power_iters)
    else:
        sigma_c = float(sigma_clamp)
        if sigma_c < 0:
            raise ValueError("sigma_clamp must be >= 0")
    excess = s0 - sigma_c
    if excess <= 0.0:
        return a.copy()
    return a - excess * np.outer(u0, v0)


def orthogonal_penalty_v1(theta, beta=DEFAULT_BETA):
    """``beta * ||theta^T theta - I||_F^2`` and its gradient."""
    a = check_matrix(theta)
    _check_beta(beta)
    resid = a.T @ a - np.eye(a.shape[1])
    return PenaltyResult(
        value=float(beta * np.sum(resid * resid)),
        gradient=4.0 * beta * (a @ resid),
    )


def orthogonal_penalty_v2(theta, beta=DEFAULT_BETA):
    """Off-diagonal Gram energy ``beta * ||theta^T theta * (1 - I)||_F^2``."""
    a = check_matrix(theta)
    _check_beta(beta)
    off = a.T @ a
    np.fill_diagonal(off, 0.0)
    return PenaltyResult(
        value=float(beta * np.sum(off * off)),
        gradient=4.0 * beta * (a @ off),
    )


def _check_beta(beta):
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")


def _inverse_iteration(a, lam, seed, norm_a, steps=3, tol=1e-8):
    n = a.shape[0]
    shift = lam + 1e-10 * norm_a
    m = a.astype(np.complex128) - shift * np.eye(n)
    z = seed.astype(np.complex128)
    for _ in range(1 + steps):
        z = np.linalg.solve(m, z)
        z /= np.linalg.norm(z)
        if np.linalg.norm(a @ z - lam * z) <= tol * norm_a:
            break
    return z


def _eig_energy_gradient(a):
    """Gradient of ``sum |lambda_i|^2`` for a matrix with simple spectrum."""
    norm_a = np.linalg.norm(a)
    schur = real_schur(a)
    lam = schur.eigenvalues
    n = lam.size
    if n > 1:
        gaps = np.abs(lam[:, None] - lam[None, :])
        gaps[np.diag_indices(n)] = np.inf
        if gaps.min() < 1e-6 * norm_a:
            raise DegenerateSpectrum(
                f"eigenvalue gap {gaps.min():.3e} below 1e-6*||X||_F; use finite differences"
            )
    grad = np.zeros_like(a)
    q = schur.q
    for start, size in schur.blocks():
        if size == 1:
            seed_r = q[:, start]
            seed_l = q[:, start]
        else:
            seed_r = q[:, start] + 1j * q[:, start + 1]
            seed_l = q[:, start] - 1j * q[:, start + 1]
        mu = lam[start]
        x = _inverse_iteration(a, mu, seed_r, norm_a)
        y = _inverse_iteration(a.T, mu, seed_l, norm_a)
        # d lambda / dX = y x^T / (y^T x)
        dlam = np.outer(y, x) / (y @ x)
        contrib = 2.0 * np.real(np.conj(mu) * dlam)
        # a conjugate pair contributes twice the same real part
        grad += contrib if size == 1 else 2.0 * contrib
    return grad


def dfn_penalty_gradient(sample, mode=GradientMode.ANALYTIC, fd_step=1e-5):
    """DFN of ``sample`` and its gradient with respect to the entries.

    Parameters
    ----------
    sample : array_like of shape (n, n)
    mode : {"analytic", "finite_diff"}
        Analytic mode uses first-order eigenvalue perturbation with right
        and left eigenvectors refined by inverse iteration; it requires a
        simple spectrum. Finite-difference mode perturbs each entry by
        ``+-fd_step``.

    Raises
    ------
    DegenerateSpectrum
        In analytic mode, when two eigenvalues are closer than
        ``1e-6 * ||X||_F``.
    """
    a = check_square(sample)
    mode = GradientMode(mode)
    value = dfn_exact(a).value
    if mode is GradientMode.FINITE_DIFF:
        grad = np.empty_like(a)
        work = a.copy()
        for idx in np.ndindex(a.shape):
            orig = work[idx]
            work[idx] = orig + fd_step
            up = dfn_exact(work).value
            work[idx] = orig - fd_step
            down = dfn_exact(work).value
            work[idx] = orig
            grad[idx] = (up - down) / (2.0 * fd_step)
        return PenaltyResult(value=value, gradient=grad)
    if not np.any(a):
        return PenaltyResult(value=0.0, gradient=np.zeros_like(a))
    grad = 2.0 * a - _eig_energy_gradient(a)
    return PenaltyResult(value=value, gradient=grad)


def dfn_gradient_batch(batch, max_cond=None):
    """DFN values and gradients for a stack ``(m, n, n)`` in one LAPACK call.

    Same formula as the analytic path of :func:`dfn_penalty_gradient`,
    using ``X = V diag(lam) V^-1`` so that
    ``grad = 2X - 2 Re(V diag(conj lam) V^-1)^T``.

    With ``max_cond`` set, samples whose eigenvector matrix is worse
    conditioned than that (near-defective spectra) get a zero gradient
    instead of an unreliable one. Non-finite gradients are always zeroed.
    """
    b = np.asarray(batch, dtype=np.float64)
    lam, v = np.linalg.eig(b)
    frob_sq = np.sum(b * b, axis=(1, 2))
    values = np.maximum(frob_sq - np.sum(np.abs(lam) ** 2, axis=1), 0.0)
    vinv = _batch_inverse(v)
    with np.errstate(all="ignore"):
        m = (v * np.conj(lam)[:, None, :]) @ vinv
        grads = 2.0 * b - 2.0 * np.real(np.transpose(m, (0, 2, 1)))
    bad = ~np.all(np.isfinite(grads), axis=(1, 2))
    if max_cond is not None:
        # Frobenius-norm condition number, an upper bound on the 2-norm one
        with np.errstate(all="ignore"):
            cond = np.linalg.norm(v, axis=(1, 2)) * np.linalg.norm(vinv, axis=(1, 2))
        bad |= ~(cond < max_cond)
    grads[bad] = 0.0
    return values, grads


def _batch_inverse(v):
    try:
        return np.linalg.inv(v)
    except np.linalg.LinAlgError:
        out = np.full_like(v, np.nan)
        for i, vi in enumerate(v):
            try:
                out[i] = np.linalg.inv(vi)
            except np.linalg.LinAlgError:
                pass
        return out
