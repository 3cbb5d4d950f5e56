"""Duration-preserving pitch shifting (phase vocoder + resampling)."""

import numpy as np
from scipy.signal import resample

from ..exceptions import ScaleOutOfRange
from .audio import AudioBuffer
from .spectrogram import _analyze, _overlap_add

PITCH_SCALES = (0.75, 0.9, 1.15, 1.5)

_NFFT = 2048
_HOP = 512


def time_stretch(x, rate, nfft=_NFFT, hop=_HOP):
    """Phase-vocoder time stretch; output length is about ``len(x) / rate``."""
    z = _analyze(x, nfft, hop)
    n_bins, n_frames = z.shape
    steps = np.arange(0.0, n_frames, rate)
    expected = 2.0 * np.pi * hop * np.arange(n_bins) / nfft
    padded = np.concatenate([z, np.zeros((n_bins, 1), dtype=z.dtype)], axis=1)
    out = np.empty((n_bins, steps.size), dtype=np.complex128)
    phase = np.angle(z[:, 0])
    for t, step in enumerate(steps):
        i = int(step)
        frac = step - i
        left, right = padded[:, i], padded[:, i + 1]
        mag = (1.0 - frac) * np.abs(left) + frac * np.abs(right)
        out[:, t] = mag * np.exp(1j * phase)
        dphi = np.angle(right) - np.angle(left) - expected
        dphi -= 2.0 * np.pi * np.round(dphi / (2.0 * np.pi))
        phase = phase + expected + dphi
    return _overlap_add(out, nfft, hop, length=int(round(x.size / rate)))


def pitch_shift(buf, scale):
    """Multiply every frequency by ``scale`` while keeping the duration.

    The signal is stretched to ``scale`` times its length, then resampled
    back to the original sample count.
    """
    if not 0.5 < scale < 2.0:
        raise ScaleOutOfRange(f"scale {scale} outside (0.5, 2)")
    x = buf.samples
    stretched = time_stretch(x, 1.0 / scale)
    y = resample(stretched, x.size)
    return AudioBuffer.clipped(y, buf.sample_rate)
