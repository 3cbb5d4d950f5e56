"""Time-frequency analysis: STFT, complex Morlet scalogram, visualizations
and magnitude-plus-phase reconstruction."""

import enum
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import (
    AlreadyVisualized,
    ColaViolation,
    LogRealIrreversible,
    NotComplex,
    NotVisualized,
    ShapeMismatch,
    SignalTooShort,
)
from .audio import AudioBuffer

__all__ = [
    "SpecKind",
    "Spectrogram",
    "hann",
    "stft",
    "istft",
    "cwt_morlet",
    "visualize",
    "reconstruct",
]

LOG_FLOOR = 1e-10
MORLET_W0 = 6.0
CWT_FMIN = 50.0
CWT_FMAX = 7000.0


class SpecKind(enum.IntEnum):
    STFT_COMPLEX = 0
    CWT_COMPLEX = 1
    VIS_LINEAR = 2
    VIS_LOG = 3
    VIS_LOG_REAL = 4

    @property
    def is_visual(self):
        return self >= SpecKind.VIS_LINEAR


@dataclass(frozen=True)
class Spectrogram:
    """Complex or magnitude grid, frequency along rows, frames along columns."""

    re: np.ndarray
    im: np.ndarray
    kind: SpecKind
    frame_len_samples: int
    hop_samples: int
    sample_rate: int
    scale_axis: tuple = field(default=())

    def __post_init__(self):
        if self.re.shape != self.im.shape:
            raise ShapeMismatch(f"re {self.re.shape} vs im {self.im.shape}")
        if self.hop_samples > self.frame_len_samples:
            raise ValueError("hop exceeds frame length")
        if self.kind.is_visual and np.any(self.im):
            raise ValueError("visualized grids carry no imaginary part")

    @property
    def shape(self):
        return self.re.shape

    @property
    def complex(self):
        return self.re + 1j * self.im

    @classmethod
    def from_complex(cls, z, kind, frame_len, hop, sample_rate, scale_axis=()):
        return cls(np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag), SpecKind(kind),
                   int(frame_len), int(hop), int(sample_rate), tuple(scale_axis))


def hann(n):
    """Periodic Hann window (sums to a constant at 50% overlap)."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _frames(x, nfft, hop):
    count = 1 + (x.size - nfft) // hop
    idx = np.arange(nfft)[None, :] + hop * np.arange(count)[:, None]
    return x[idx]


def _analyze(x, nfft, hop):
    """Reflect-padded Hann STFT, bins x frames."""
    padded = np.pad(x, nfft // 2, mode="reflect")
    frames = _frames(padded, nfft, hop) * hann(nfft)
    return np.fft.rfft(frames, axis=1).T


def _overlap_add(z, nfft, hop, length=None):
    """Weighted overlap-add with window-square normalization; trims the pad."""
    w = hann(nfft)
    frames = np.fft.irfft(z.T, n=nfft, axis=1) * w
    count = frames.shape[0]
    total = nfft + hop * (count - 1)
    out = np.zeros(total)
    norm = np.zeros(total)
    for i in range(count):
        out[i * hop:i * hop + nfft] += frames[i]
        norm[i * hop:i * hop + nfft] += w * w
    nz = norm > 1e-10
    out[nz] /= norm[nz]
    out = out[nfft // 2:]
    if length is None:
        length = hop * (count - 1)
    return out[:length] if out.size >= length else np.pad(out, (0, length - out.size))


def stft(buf, nfft=2048, hop=1024):
    """Short-time Fourier transform with a periodic Hann window.

    The signal is reflect-padded by ``nfft // 2`` on both sides; the grid
    has ``nfft // 2 + 1`` rows and ``1 + (len + nfft - nfft) // hop``
    columns.
    """
    if nfft < 2 or nfft & (nfft - 1):
        raise ValueError(f"nfft must be a power of two, got {nfft}")
    if not 0 < hop <= nfft:
        raise ValueError("hop must be in (0, nfft]")
    x = buf.samples
    if x.size < hop or x.size <= nfft // 2:
        raise SignalTooShort(f"{x.size} samples is too short for nfft={nfft}, hop={hop}")
    z = _analyze(x, nfft, hop)
    return Spectrogram.from_complex(z, SpecKind.STFT_COMPLEX, nfft, hop, buf.sample_rate)


def istft(spec):
    """Inverse of :func:`stft` for 50%-overlap Hann grids."""
    if spec.kind != SpecKind.STFT_COMPLEX:
        raise NotComplex(f"istft needs an STFT grid, got {spec.kind.name}")
    nfft, hop = spec.frame_len_samples, spec.hop_samples
    if 2 * hop != nfft:
        raise ColaViolation(f"hop {hop} must equal nfft/2 = {nfft // 2}")
    y = _overlap_add(spec.complex, nfft, hop)
    return AudioBuffer.clipped(y, spec.sample_rate)


def morlet_center_frequencies(num_scales, fmin=CWT_FMIN, fmax=CWT_FMAX):
    return np.geomspace(fmin, fmax, num_scales)


def cwt_morlet(buf, num_scales=128, frame_ms=50.0, overlap=0.5):
    """Complex Morlet scalogram pooled into fixed-length frames.

    Each scale is filtered over the whole signal in the frequency domain
    with an analytic Morlet (``w0 = 6``) normalized to unit gain at its
    center frequency. The coefficients are then cut into frames of
    ``frame_ms`` with the given overlap; each cell holds the mean
    magnitude over its frame with the phase of the frame's middle sample.
    """
    if num_scales < 8:
        raise ValueError("num_scales must be >= 8")
    if not 0.0 <= overlap < 1.0:
        raise ValueError("overlap must be in [0, 1)")
    sr = buf.sample_rate
    frame = int(round(frame_ms * sr / 1000.0))
    if frame < 64:
        raise ValueError(f"frame of {frame} samples is below the 64-sample minimum")
    hop = max(1, int(round(frame * (1.0 - overlap))))
    x = buf.samples
    if x.size < frame:
        raise SignalTooShort(f"{x.size} samples is shorter than one {frame}-sample frame")

    centers = morlet_center_frequencies(num_scales, CWT_FMIN, min(CWT_FMAX, 0.45 * sr))
    nfft = 1 << int(np.ceil(np.log2(x.size + frame)))
    spectrum = np.fft.fft(x, nfft)
    omega = 2.0 * np.pi * np.fft.fftfreq(nfft, d=1.0 / sr)
    count = 1 + (x.size - frame) // hop
    starts = hop * np.arange(count)
    mid = starts + frame // 2
    grid = np.empty((num_scales, count), dtype=np.complex128)
    for row, fc in enumerate(centers):
        scale = MORLET_W0 / (2.0 * np.pi * fc)
        resp = np.where(omega > 0, 2.0 * np.exp(-0.5 * (scale * omega - MORLET_W0) ** 2), 0.0)
        coeff = np.fft.ifft(spectrum * resp)[: x.size]
        mag = np.abs(coeff)
        csum = np.concatenate(([0.0], np.cumsum(mag)))
        pooled = (csum[starts + frame] - csum[starts]) / frame
        phase = np.angle(coeff[mid])
        grid[row] = pooled * np.exp(1j * phase)
    return Spectrogram.from_complex(grid, SpecKind.CWT_COMPLEX, frame, hop, sr, centers)


_VIS_KINDS = {
    "linear": SpecKind.VIS_LINEAR,
    "log": SpecKind.VIS_LOG,
    "logreal": SpecKind.VIS_LOG_REAL,
}


def visualize(spec, kind):
    """Magnitude view of a complex grid: ``linear``, ``log`` or ``logreal``.

    ``log`` floors the magnitude at 1e-10 before the logarithm;
    ``logreal`` is ``ln|re|`` and exactly 0 wherever ``re == 0``.
    """
    if spec.kind.is_visual:
        raise AlreadyVisualized(f"grid is already {spec.kind.name}")
    out_kind = _VIS_KINDS[kind] if isinstance(kind, str) else SpecKind(kind)
    re, im = spec.re, spec.im
    if out_kind == SpecKind.VIS_LINEAR:
        data = np.sqrt(re * re + im * im)
    elif out_kind == SpecKind.VIS_LOG:
        data = np.log(np.maximum(np.sqrt(re * re + im * im), LOG_FLOOR))
    elif out_kind == SpecKind.VIS_LOG_REAL:
        data = np.zeros_like(re)
        nz = re != 0.0
        data[nz] = np.log(np.abs(re[nz]))
    else:
        raise ValueError(f"{out_kind.name} is not a visualization")
    return Spectrogram(data, np.zeros_like(data), out_kind, spec.frame_len_samples,
                       spec.hop_samples, spec.sample_rate, spec.scale_axis)


def reconstruct(vis, phase):
    """Audio from a linear/log STFT magnitude view and a phase matrix (radians)."""
    if vis.kind == SpecKind.VIS_LOG_REAL:
        raise LogRealIrreversible("log-real views drop sign and imaginary data")
    if not vis.kind.is_visual:
        raise NotVisualized(f"expected a visualized grid, got {vis.kind.name}")
    if len(vis.scale_axis):
        raise NotComplex("only STFT-derived views can be inverted")
    phase = np.asarray(phase, dtype=np.float64)
    if phase.shape != vis.shape:
        raise ShapeMismatch(f"phase {phase.shape} vs magnitude {vis.shape}")
    mag = np.exp(vis.re) if vis.kind == SpecKind.VIS_LOG else vis.re
    z = mag * np.exp(1j * phase)
    spec = Spectrogram.from_complex(z, SpecKind.STFT_COMPLEX, vis.frame_len_samples,
                                    vis.hop_samples, vis.sample_rate)
    return istft(spec)
