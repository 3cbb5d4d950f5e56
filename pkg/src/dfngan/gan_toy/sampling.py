"""Latent sampling, hinge losses and the synthetic Gabor dataset."""

import numpy as np

from ..exceptions import EmptyBatch

MAX_REDRAWS = 1000


def sample_z(dim, alpha, rng, size=None):
    """Standard normal latents, optionally truncated to ``[-alpha, alpha]``.

    Components outside the threshold are redrawn; after ``MAX_REDRAWS``
    rounds any survivors are clamped. ``alpha = 0`` disables truncation.
    ``size`` draws a ``(size, dim)`` batch instead of one vector.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    shape = (dim,) if size is None else (size, dim)
    z = rng.standard_normal(shape)
    if alpha > 0:
        bad = np.abs(z) > alpha
        rounds = 0
        while np.any(bad) and rounds < MAX_REDRAWS:
            z[bad] = rng.standard_normal(int(bad.sum()))
            bad = np.abs(z) > alpha
            rounds += 1
        if np.any(bad):
            np.clip(z, -alpha, alpha, out=z)
    return z


def hinge_losses(d_real, d_fake):
    """Discriminator and generator hinge losses.

    ``d_loss = mean(relu(1 - d_real)) + mean(relu(1 + d_fake))`` and
    ``g_loss = -mean(d_fake)``.
    """
    d_real = np.asarray(d_real, dtype=np.float64).ravel()
    d_fake = np.asarray(d_fake, dtype=np.float64).ravel()
    if d_real.size == 0 or d_fake.size == 0:
        raise EmptyBatch("score vectors must be nonempty")
    d_loss = np.mean(np.maximum(0.0, 1.0 - d_real)) + np.mean(np.maximum(0.0, 1.0 + d_fake))
    g_loss = -np.mean(d_fake)
    return float(d_loss), float(g_loss)


def _gabor(side, rng):
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    cy, cx = rng.uniform(0.2 * side, 0.8 * side, size=2)
    theta = rng.uniform(0.0, np.pi)
    sigma = rng.uniform(0.08, 0.25) * side
    freq = rng.uniform(0.05, 0.25)  # cycles per pixel
    phase = rng.uniform(0.0, 2.0 * np.pi)
    gamma = rng.uniform(0.5, 1.0)
    xr = (xx - cx) * np.cos(theta) + (yy - cy) * np.sin(theta)
    yr = -(xx - cx) * np.sin(theta) + (yy - cy) * np.cos(theta)
    env = np.exp(-(xr * xr + (gamma * yr) ** 2) / (2.0 * sigma * sigma))
    return env * np.cos(2.0 * np.pi * freq * xr + phase)


def synth_dataset(n, side=16, seed=0):
    """``n`` side x side samples, each a sum of 2-4 random Gabor blobs in ``[-1, 1]``."""
    if side < 8:
        raise ValueError("side must be >= 8")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        img = np.zeros((side, side))
        for _ in range(rng.integers(2, 5)):
            img += rng.uniform(0.5, 1.0) * _gabor(side, rng)
        peak = np.max(np.abs(img))
        out.append(img / peak if peak > 0 else img)
    return out
