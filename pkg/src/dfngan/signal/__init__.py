"""Audio ingestion, spectrogram analysis, augmentation and reconstruction."""

from .audio import AudioBuffer, read_wav, resample_linear, snr_db, write_wav
from .pitch import PITCH_SCALES, pitch_shift, time_stretch
from .spectrogram import (
    SpecKind,
    Spectrogram,
    cwt_morlet,
    istft,
    reconstruct,
    stft,
    visualize,
)
from .spgio import read_spg, write_spg

__all__ = [
    "AudioBuffer",
    "read_wav",
    "write_wav",
    "resample_linear",
    "snr_db",
    "PITCH_SCALES",
    "pitch_shift",
    "time_stretch",
    "SpecKind",
    "Spectrogram",
    "stft",
    "istft",
    "cwt_morlet",
    "visualize",
    "reconstruct",
    "read_spg",
    "write_spg",
]
