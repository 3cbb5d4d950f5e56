"""Desk-scale GAN harness for the difference-DFN condition."""

from .metrics import frechet_gaussian, random_projection_embedder
from .monitor import detect_collapse, rolling_slopes
from .nets import Activation, Adam, DenseNet, Layer, backward, build_net, forward, orthogonal
from .sampling import hinge_losses, sample_z, synth_dataset
from .train import (
    GanConfig,
    GanResult,
    TraceRow,
    TrainTrace,
    fit_gan,
    generate,
    load_config,
    load_generator,
    save_generator,
    train,
)

__all__ = [
    "Activation",
    "Adam",
    "DenseNet",
    "Layer",
    "backward",
    "build_net",
    "forward",
    "orthogonal",
    "hinge_losses",
    "sample_z",
    "synth_dataset",
    "GanConfig",
    "GanResult",
    "TraceRow",
    "TrainTrace",
    "fit_gan",
    "generate",
    "load_config",
    "load_generator",
    "save_generator",
    "train",
    "detect_collapse",
    "rolling_slopes",
    "frechet_gaussian",
    "random_projection_embedder",
]
