"""Audio buffers, 16-bit PCM WAV I/O and SNR."""

import logging
import wave
from dataclasses import dataclass

import numpy as np

from ..exceptions import (
    AmplitudeOutOfRange,
    CorruptHeader,
    DimensionMismatch,
    EmptySignal,
    NonFinite,
    UnsupportedFormat,
)

log = logging.getLogger(__name__)

CANONICAL_RATE = 16000
SNR_CAP_DB = 300.0
_PCM_SCALE = 32767.0


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio in ``[-1, 1]`` at ``sample_rate`` Hz."""

    samples: np.ndarray
    sample_rate: int = CANONICAL_RATE

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or s.size == 0:
            raise EmptySignal("audio must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(s)):
            raise NonFinite("audio contains NaN or Inf")
        peak = float(np.max(np.abs(s)))
        if peak > 1.0 + 1e-6:
            raise AmplitudeOutOfRange(f"peak amplitude {peak:.6f} exceeds 1")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return self.samples.size

    @property
    def duration(self):
        return self.samples.size / self.sample_rate

    @classmethod
    def clipped(cls, samples, sample_rate=CANONICAL_RATE):
        """Build a buffer from processed audio, clipping overshoot to ``[-1, 1]``."""
        s = np.asarray(samples, dtype=np.float64)
        over = np.abs(s) > 1.0
        if np.any(over):
            log.warning("clipping %d samples outside [-1, 1]", int(over.sum()))
            s = np.clip(s, -1.0, 1.0)
        return cls(s, sample_rate)


def resample_linear(samples, src_rate, dst_rate):
    """Linear-interpolation resampling."""
    x = np.asarray(samples, dtype=np.float64)
    if src_rate == dst_rate:
        return x.copy()
    n_out = max(1, int(round(x.size * dst_rate / src_rate)))
    t_out = np.arange(n_out) * (src_rate / dst_rate)
    return np.interp(t_out, np.arange(x.size), x)


def read_wav(path, target_rate=CANONICAL_RATE):
    """Read a 16-bit PCM WAV file as a mono :class:`AudioBuffer`.

    Multi-channel files keep only the first channel. Files at another rate
    are linearly resampled to ``target_rate``.
    """
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        msg = str(exc)
        if "unknown format" in msg:
            raise UnsupportedFormat(f"{path}: {msg}") from exc
        raise CorruptHeader(f"{path}: {msg}") from exc
    except EOFError as exc:
        raise CorruptHeader(f"{path}: truncated header") from exc
    if width != 2:
        raise UnsupportedFormat(f"{path}: {8 * width}-bit samples, only 16-bit PCM is supported")
    data = np.frombuffer(raw, dtype="<i2")
    if n_channels > 1:
        data = data[: data.size - data.size % n_channels].reshape(-1, n_channels)[:, 0]
    if data.size == 0:
        raise EmptySignal(f"{path}: no samples")
    x = np.clip(data.astype(np.float64) / _PCM_SCALE, -1.0, 1.0)
    if rate != target_rate:
        x = resample_linear(x, rate, target_rate)
    return AudioBuffer(x, target_rate)


def write_wav(path, buf):
    """Write ``buf`` as mono 16-bit little-endian PCM."""
    pcm = np.round(np.clip(buf.samples, -1.0, 1.0) * _PCM_SCALE).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(int(buf.sample_rate))
        wf.writeframes(pcm.tobytes())


def snr_db(reference, test):
    """Signal-to-noise ratio of ``test`` against ``reference`` in dB.

    Both signals are trimmed to the shorter length. The result is capped
    to ``+-300`` dB, which is what identical signals report.
    """
    if reference.sample_rate != test.sample_rate:
        raise DimensionMismatch(
            f"sample rates differ: {reference.sample_rate} vs {test.sample_rate}"
        )
    n = min(len(reference), len(test))
    if n == 0:
        raise EmptySignal("nothing to compare")
    ref = reference.samples[:n]
    resid = ref - test.samples[:n]
    p_sig = float(np.dot(ref, ref))
    p_res = float(np.dot(resid, resid))
    if p_res == 0.0:
        return SNR_CAP_DB
    if p_sig == 0.0:
        return -SNR_CAP_DB
    return float(np.clip(10.0 * np.log10(p_sig / p_res), -SNR_CAP_DB, SNR_CAP_DB))
