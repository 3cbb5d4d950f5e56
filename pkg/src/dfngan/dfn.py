"""Departure from normality (DFN) of square matrices.

The DFN of ``X`` is ``||X||_F^2 - sum |lambda_i|^2``: the energy of the
strictly upper part of its Schur triangular factor, zero exactly when
``X`` is normal. Two routes are provided: an exact one through the real
Schur form, and a fast surrogate that replaces the eigenvalue energy with
a scaled determinant of a symmetrized, 2x-downsampled copy of the input
(a Gaussian-orthogonal-ensemble style estimate).
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from ._validation import check_square, check_square_batch
from .exceptions import DimensionMismatch, EmptyBatch, Overflow, TooSmall
from .linalg import downsample2, real_schur

__all__ = [
    "DfnMethod",
    "DfnReport",
    "GoeConfig",
    "dfn_exact",
    "dfn_exact_batch",
    "build_goe_surrogate",
    "goe_log_constant",
    "dfn_fast",
    "difference_dfn",
    "interpolation_error_bound",
    "minkowski_question_mark",
]

PHASE_OFFSETS = ((0, 0), (0, 1), (1, 0), (1, 1))


class DfnMethod(str, enum.Enum):
    EXACT = "exact"
    FAST_GOE = "fast_goe"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        v = str(value).lower().replace("-", "_")
        if v in ("fast", "fastgoe"):
            v = "fast_goe"
        return cls(v)


@dataclass(frozen=True)
class DfnReport:
    value: float
    frob_sq: float
    eig_sq_sum: float
    method: DfnMethod
    clamped: bool = False

    def to_dict(self):
        return {
            "value": self.value,
            "frob_sq": self.frob_sq,
            "eig_sq_sum": self.eig_sq_sum,
            "method": self.method.value,
            "clamped": self.clamped,
        }


@dataclass(frozen=True)
class GoeConfig:
    """Settings for :func:`dfn_fast`.

    ``nu`` is the scalar function in the normalization constant; the
    Gamma function by default. ``num_phase_offsets`` picks how many 2x2
    pooling phases the determinant expectation averages over.
    """

    num_phase_offsets: int = 4
    seed: int = 0
    clamp_nonneg: bool = True
    nu: str = "gamma"

    def __post_init__(self):
        if self.num_phase_offsets not in (1, 4):
            raise ValueError("num_phase_offsets must be 1 or 4")
        if self.nu not in ("gamma", "minkowski"):
            raise ValueError("nu must be 'gamma' or 'minkowski'")


def dfn_exact(x, tol=1e-12):
    """Exact DFN from the eigenvalues of the real Schur form."""
    a = check_square(x)
    frob_sq = float(np.sum(a * a))
    eig = real_schur(a, tol=tol).eigenvalues
    eig_sq = float(np.sum(eig.real ** 2 + eig.imag ** 2))
    raw = frob_sq - eig_sq
    return DfnReport(
        value=max(0.0, raw),
        frob_sq=frob_sq,
        eig_sq_sum=eig_sq,
        method=DfnMethod.EXACT,
        clamped=raw < 0.0,
    )


def dfn_exact_batch(batch):
    """Exact DFN for a stack of matrices via LAPACK eigenvalues.

    Vectorized counterpart of :func:`dfn_exact` for hot loops; returns an
    array of clamped DFN values.
    """
    b = check_square_batch(batch)
    frob_sq = np.sum(b * b, axis=(1, 2))
    eig = np.linalg.eigvals(b)
    eig_sq = np.sum(eig.real ** 2 + eig.imag ** 2, axis=1)
    return np.maximum(frob_sq - eig_sq, 0.0)


def _crop_square(x):
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 2 and a.shape[0] != a.shape[1]:
        m = min(a.shape)
        a = a[:m, :m]
    return a


def build_goe_surrogate(x, phase_row=0, phase_col=0):
    """Symmetrized 2x mean-pooled copy of ``x``: ``(p + p.T) / 2``.

    Non-square inputs are cropped to their leading square block first, and
    so is the pooled grid when mixed phases leave it one row or column
    short.
    """
    a = check_square(_crop_square(x))
    if a.shape[0] < 2:
        raise TooSmall("surrogate needs n >= 2")
    p = _crop_square(downsample2(a, phase_row, phase_col))
    return 0.5 * (p + p.T)


def minkowski_question_mark(x):
    """Minkowski's question-mark function, extended by ``?(x + 1) = ?(x) + 1``."""
    if x < 0:
        raise ValueError("defined here for x >= 0")
    whole = math.floor(x)
    frac = x - whole
    # continued-fraction expansion of the fractional part
    terms = []
    r = frac
    for _ in range(64):
        if r < 1e-15:
            break
        inv = 1.0 / r
        a = math.floor(inv)
        terms.append(a)
        r = inv - a
    total = 0.0
    sign = 1.0
    exp = 0
    for a in terms:
        exp += a
        total += sign * 2.0 ** (1 - exp)
        sign = -sign
    return whole + total


@lru_cache(maxsize=256)
def goe_log_constant(k, nu="gamma"):
    """``log C(k)`` with ``C(k) = 2^(k/2) * prod_{i=1..k} nu(i/2)``.

    Returns ``-inf`` when a factor vanishes.
    """
    log_c = 0.5 * k * math.log(2.0)
    for i in range(1, k + 1):
        if nu == "gamma":
            log_c += float(gammaln(i / 2.0))
        else:
            v = minkowski_question_mark(i / 2.0)
            if v == 0.0:
                return -math.inf
            log_c += math.log(v)
    return log_c


def dfn_fast(x, cfg=None):
    """Fast DFN estimate from the GOE surrogate determinant.

    The eigenvalue energy is replaced by ``C(k) * mean_p det(S_p)`` where
    ``S_p`` is :func:`build_goe_surrogate` at pooling phase ``p`` and
    ``k`` its size. Products are formed in log space with explicit sign
    tracking.

    Raises
    ------
    TooSmall
        If the (cropped) input is smaller than 4x4.
    Overflow
        If the surrogate energy is beyond float64 range.
    """
    cfg = cfg or GoeConfig()
    a = check_square(_crop_square(x))
    n = a.shape[0]
    if n < 4:
        raise TooSmall(f"fast DFN needs n >= 4, got {n}")
    frob_sq = float(np.sum(a * a))

    offsets = PHASE_OFFSETS[: cfg.num_phase_offsets]
    signs = []
    logs = []
    for pr, pc in offsets:
        s = build_goe_surrogate(a, pr, pc)
        sign, logdet = np.linalg.slogdet(s)
        logs.append(goe_log_constant(s.shape[0], cfg.nu) + logdet)
        signs.append(sign)
    logs = np.array(logs)
    signs = np.array(signs)
    live = signs != 0
    if not np.any(live) or np.all(np.isneginf(logs[live])):
        surrogate = 0.0
    else:
        top = float(np.max(logs[live]))
        acc = float(np.sum(signs[live] * np.exp(logs[live] - top)))
        if acc == 0.0:
            surrogate = 0.0
        else:
            log_mag = top + math.log(abs(acc)) - math.log(len(offsets))
            if log_mag > math.log(np.finfo(np.float64).max):
                k = n // 2
                raise Overflow(f"surrogate energy overflows (k={k}, log-magnitude {log_mag:.1f})")
            surrogate = math.copysign(math.exp(log_mag), acc)

    raw = frob_sq - surrogate
    clamped = cfg.clamp_nonneg and raw < 0.0
    return DfnReport(
        value=0.0 if clamped else raw,
        frob_sq=frob_sq,
        eig_sq_sum=surrogate,
        method=DfnMethod.FAST_GOE,
        clamped=clamped,
    )


def _mean_dfn(batch, method, cfg):
    if method is DfnMethod.EXACT:
        vals = [dfn_exact(m).value for m in batch]
    else:
        vals = [dfn_fast(m, cfg).value for m in batch]
    total = 0.0
    for v in vals:  # fixed left-to-right reduction order
        total += v
    return total / len(vals)


def difference_dfn(gen_batch, real_batch, method=DfnMethod.EXACT, cfg=None):
    """``|mean DFN(generated) - mean DFN(real)|`` with one method for both sides."""
    method = DfnMethod.parse(method)
    if len(gen_batch) == 0 or len(real_batch) == 0:
        raise EmptyBatch("both batches must be nonempty")
    g = check_square_batch(gen_batch, "gen_batch")
    r = check_square_batch(real_batch, "real_batch")
    if g.shape[1] != r.shape[1]:
        raise DimensionMismatch(f"generated {g.shape[1]}x{g.shape[1]} vs real {r.shape[1]}x{r.shape[1]}")
    return abs(_mean_dfn(g, method, cfg) - _mean_dfn(r, method, cfg))


def interpolation_error_bound(second_deriv_bound, node_gap):
    """Worst-case linear interpolation error ``M / 8 * h^2`` between two nodes."""
    if not (math.isfinite(second_deriv_bound) and second_deriv_bound >= 0):
        raise ValueError("second_deriv_bound must be finite and >= 0")
    if not (math.isfinite(node_gap) and node_gap > 0):
        raise ValueError("node_gap must be finite and > 0")
    return second_deriv_bound / 8.0 * node_gap * node_gap
