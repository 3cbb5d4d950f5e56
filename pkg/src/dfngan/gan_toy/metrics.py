"""Fréchet distance between Gaussian fits of two feature sets."""

import numpy as np

from ..exceptions import DimMismatch, NonPsd

NEG_EIG_TOL = 1e-8


def random_projection_embedder(dim=32, seed=0):
    """Flatten each sample and project with a fixed seeded Gaussian matrix."""

    cache = {}

    def embed(samples):
        flat = np.stack([np.asarray(s, dtype=np.float64).ravel() for s in samples])
        d_in = flat.shape[1]
        if d_in not in cache:
            rng = np.random.default_rng(seed)
            cache[d_in] = rng.standard_normal((d_in, dim)) / np.sqrt(d_in)
        return flat @ cache[d_in]

    return embed


def _fit(feats, name):
    f = np.asarray(feats, dtype=np.float64)
    if f.ndim != 2 or f.shape[0] < 2:
        raise DimMismatch(f"{name} needs at least two feature vectors")
    return f.mean(axis=0), np.cov(f, rowvar=False).reshape(f.shape[1], f.shape[1])


def _psd_sqrt(s):
    w, v = np.linalg.eigh(0.5 * (s + s.T))
    if w.min() < -NEG_EIG_TOL * max(1.0, abs(w).max()):
        raise NonPsd(f"covariance has eigenvalue {w.min():.3e}")
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.T


def frechet_gaussian(feats_a, feats_b):
    """``|mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2))``.

    The trace of the product square root is taken from the eigenvalues of
    the symmetric matrix ``S_a^(1/2) S_b S_a^(1/2)``, which shares its
    spectrum with ``S_a S_b``. Small negative eigenvalues from rounding are
    clamped; larger ones raise :class:`NonPsd`.
    """
    mu_a, s_a = _fit(feats_a, "feats_a")
    mu_b, s_b = _fit(feats_b, "feats_b")
    if mu_a.shape != mu_b.shape:
        raise DimMismatch(f"feature dims differ: {mu_a.size} vs {mu_b.size}")
    root_a = _psd_sqrt(s_a)
    m = root_a @ s_b @ root_a
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    scale = max(1.0, abs(w).max())
    if w.min() < -NEG_EIG_TOL * scale:
        raise NonPsd(f"product has eigenvalue {w.min():.3e}")
    tr_sqrt = float(np.sum(np.sqrt(np.maximum(w, 0.0))))
    diff = mu_a - mu_b
    value = float(diff @ diff + np.trace(s_a) + np.trace(s_b) - 2.0 * tr_sqrt)
    return max(value, 0.0)
