"""Toy GAN training with the difference-DFN generator penalty.

A dense generator maps latents to side x side samples (tanh output); a
dense discriminator scores flattened samples. Each iteration performs one
discriminator and one generator Adam step on hinge losses. The generator
loss adds ``dfn_weight * |mean DFN(fake) - mean DFN(real)|``; the
difference is logged every iteration whether or not it is penalized.
"""

import csv
import dataclasses
import json
import logging
import math
import struct
import time
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..dfn import DfnMethod, GoeConfig, dfn_exact_batch, dfn_fast
from ..exceptions import CorruptHeader, DimMismatch, EmptyBatch
from ..linalg import top_singular_triplet
from ..regularizers import (
    STOP_GRAD_SECOND,
    dfn_gradient_batch,
    orthogonal_penalty_v1,
    orthogonal_penalty_v2,
    spectral_clamp_update,
)
from .nets import Activation, Adam, DenseNet, Layer, backward, build_net, forward
from .sampling import hinge_losses, sample_z

log = logging.getLogger(__name__)

TRACE_COLUMNS = ("iter", "d_loss", "g_loss", "diff_dfn", "sigma0_d", "wall_ms")
# eigenvector matrices worse conditioned than this give unusable DFN gradients
_MAX_EIGVEC_COND = 1e8


@dataclass
class GanConfig:
    z_dim: int = 16
    sample_side: int = 16
    batch: int = 64
    hidden: int = 128
    lr_d: float = 2e-4
    lr_g: float = 3e-5
    adam_beta1: float = 0.0
    adam_beta2: float = 0.9
    dfn_weight: float = 0.1
    dfn_method: DfnMethod = DfnMethod.EXACT
    truncation: float = 0.0
    spectral_clamp_on_d: bool = True
    spectral_clamp_on_g: bool = False
    sigma_clamp: Union[float, str] = 1.0
    ortho_reg: str = "off"
    ortho_beta: float = 1e-4
    max_iters: int = 2000
    seed: int = 0

    def __post_init__(self):
        self.dfn_method = DfnMethod.parse(self.dfn_method)
        self.ortho_reg = str(self.ortho_reg).lower()
        if self.batch < 2:
            raise ValueError("batch must be >= 2")
        if self.lr_d <= 0 or self.lr_g <= 0:
            raise ValueError("learning rates must be positive")
        if self.dfn_weight < 0:
            raise ValueError("dfn_weight must be >= 0")
        if self.truncation < 0:
            raise ValueError("truncation must be >= 0")
        if self.ortho_reg not in ("off", "v1", "v2"):
            raise ValueError("ortho_reg must be off, v1 or v2")
        if isinstance(self.sigma_clamp, str) and self.sigma_clamp != STOP_GRAD_SECOND:
            raise ValueError(f"sigma_clamp must be a number or {STOP_GRAD_SECOND!r}")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["dfn_method"] = self.dfn_method.value
        return d


@dataclass(frozen=True)
class TraceRow:
    iter: int
    d_loss: float
    g_loss: float
    diff_dfn: float
    sigma0_d: float
    wall_ms: float = 0.0


@dataclass
class TrainTrace:
    rows: list = field(default_factory=list)
    diverged: bool = False

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=np.float64)

    def metrics(self):
        """All columns except wall time, for reproducibility checks."""
        return np.array([[r.iter, r.d_loss, r.g_loss, r.diff_dfn, r.sigma0_d] for r in self.rows])

    def terminal_diff_dfn(self, fraction=0.2):
        """Median ``diff_dfn`` over the last ``fraction`` of the finite rows."""
        vals = self.column("diff_dfn")
        vals = vals[np.isfinite(vals)]
        tail = max(1, int(math.ceil(fraction * vals.size)))
        return float(np.median(vals[-tail:]))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_COLUMNS)
            for r in self.rows:
                w.writerow([r.iter] + [repr(float(getattr(r, c))) for c in TRACE_COLUMNS[1:]])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != TRACE_COLUMNS:
                raise CorruptHeader(f"{path}: expected header {','.join(TRACE_COLUMNS)}")
            rows = [TraceRow(int(rec[0]), *(float(v) for v in rec[1:])) for rec in reader if rec]
        diverged = bool(rows) and not math.isfinite(rows[-1].d_loss)
        return cls(rows, diverged)


@dataclass
class GanResult:
    generator: DenseNet
    discriminator: DenseNet
    trace: TrainTrace
    config: GanConfig


def _sample_dfn(samples, method, need_grad):
    """Per-sample DFN values and (optionally) exact-DFN gradients."""
    grads = None
    if need_grad:
        values, grads = dfn_gradient_batch(samples, max_cond=_MAX_EIGVEC_COND)
    if method is DfnMethod.EXACT:
        if not need_grad:
            values = dfn_exact_batch(samples)
    else:
        cfg = GoeConfig()
        values = np.array([dfn_fast(s, cfg).value for s in samples])
    return values, grads


def _top_sigma(net):
    return max(top_singular_triplet(layer.weights)[0] for layer in net.layers)


def _clamp_weights(net, sigma_clamp):
    for layer in net.layers:
        layer.weights[...] = spectral_clamp_update(layer.weights, sigma_clamp)


def _flat_grads(grads):
    out = []
    for dw, db in grads:
        out.extend((dw, db))
    return out


def _finite_net(net):
    return all(np.all(np.isfinite(p)) for p in net.params())


def _iteration(cfg, gen, disc, opt_g, opt_d, penalty, real, real_flat, real_dfn, rng):
    """One D step and one G step; returns the trace metrics or None on divergence."""
    b = cfg.batch
    side = cfg.sample_side
    n_pix = side * side

    # discriminator step
    idx = rng.integers(0, len(real), b)
    z = sample_z(cfg.z_dim, cfg.truncation, rng, size=b)
    fake, _ = forward(gen, z)
    d_real, tape_r = forward(disc, real_flat[idx])
    d_fake, tape_f = forward(disc, fake)
    d_loss, _ = hinge_losses(d_real, d_fake)
    g_real = -((1.0 - d_real) > 0.0).astype(np.float64) / b
    g_fake = ((1.0 + d_fake) > 0.0).astype(np.float64) / b
    _, grads_r = backward(disc, tape_r, g_real)
    _, grads_f = backward(disc, tape_f, g_fake)
    d_grads = [(wr + wf, br + bf) for (wr, br), (wf, bf) in zip(grads_r, grads_f)]
    if penalty is not None:
        for i, layer in enumerate(disc.layers):
            res = penalty(layer.weights, cfg.ortho_beta)
            d_loss += res.value
            d_grads[i] = (d_grads[i][0] + res.gradient, d_grads[i][1])
    opt_d.step(_flat_grads(d_grads))
    if not (math.isfinite(d_loss) and _finite_net(disc)):
        return None
    if cfg.spectral_clamp_on_d:
        _clamp_weights(disc, cfg.sigma_clamp)

    # generator step
    z = sample_z(cfg.z_dim, cfg.truncation, rng, size=b)
    fake, tape_g = forward(gen, z)
    d_fake, tape_f = forward(disc, fake)
    g_loss = -float(np.mean(d_fake))
    dx, _ = backward(disc, tape_f, np.full_like(d_fake, -1.0 / b))
    if not np.all(np.isfinite(fake)):
        return None
    samples = fake.reshape(b, side, side)
    penalize = cfg.dfn_weight > 0.0
    fake_dfn, dfn_grads = _sample_dfn(samples, cfg.dfn_method, need_grad=penalize)
    gap = float(np.mean(fake_dfn) - np.mean(real_dfn[idx]))
    diff = abs(gap)
    g_loss += cfg.dfn_weight * diff
    if penalize and gap != 0.0:
        dx = dx + (cfg.dfn_weight * math.copysign(1.0, gap) / b) * dfn_grads.reshape(b, n_pix)
    _, g_grads = backward(gen, tape_g, dx)
    opt_g.step(_flat_grads(g_grads))
    if not (math.isfinite(g_loss) and math.isfinite(diff) and _finite_net(gen)):
        return None
    if cfg.spectral_clamp_on_g:
        _clamp_weights(gen, cfg.sigma_clamp)
    return float(d_loss), float(g_loss), diff, _top_sigma(disc)


def fit_gan(cfg, data, clock=time.perf_counter):
    """Train a generator/discriminator pair; see :func:`train`.

    ``clock`` supplies wall time for the ``wall_ms`` column; pass ``None``
    to record zeros and keep the whole trace byte-reproducible.
    """
    if len(data) == 0:
        raise EmptyBatch("training data is empty")
    side = cfg.sample_side
    real = np.stack([np.asarray(x, dtype=np.float64) for x in data])
    if real.shape[1:] != (side, side):
        raise DimMismatch(f"samples are {real.shape[1:]}, config expects {side}x{side}")
    rng = np.random.default_rng(cfg.seed)
    n_pix = side * side
    real_flat = real.reshape(len(real), n_pix)
    real_dfn, _ = _sample_dfn(real, cfg.dfn_method, need_grad=False)

    gen = build_net([cfg.z_dim, cfg.hidden, cfg.hidden, n_pix], rng, final=Activation.TANH)
    disc = build_net([n_pix, cfg.hidden, cfg.hidden, 1], rng, final=Activation.IDENTITY)
    opt_g = Adam(gen.params(), cfg.lr_g, cfg.adam_beta1, cfg.adam_beta2)
    opt_d = Adam(disc.params(), cfg.lr_d, cfg.adam_beta1, cfg.adam_beta2)
    penalty = {"v1": orthogonal_penalty_v1, "v2": orthogonal_penalty_v2}.get(cfg.ortho_reg)
    trace = TrainTrace()

    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, cfg.max_iters + 1):
            t0 = clock() if clock else 0.0
            row = _iteration(cfg, gen, disc, opt_g, opt_d, penalty, real, real_flat,
                             real_dfn, rng)
            wall_ms = (clock() - t0) * 1e3 if clock else 0.0
            if row is None:
                log.warning("training diverged at iteration %d", it)
                trace.rows.append(TraceRow(it, math.nan, math.nan, math.nan, math.nan, wall_ms))
                trace.diverged = True
                break
            trace.rows.append(TraceRow(it, *row, wall_ms))

    return GanResult(gen, disc, trace, cfg)


def train(cfg, data, clock=time.perf_counter):
    """Run the toy GAN and return its per-iteration :class:`TrainTrace`.

    On NaN/Inf losses the trace ends with a marker row of NaNs and
    ``trace.diverged`` is set.
    """
    return fit_gan(cfg, data, clock).trace


def generate(gen, n, alpha=0.0, seed=0, side=None):
    """Draw ``n`` samples from a trained generator with latent truncation ``alpha``."""
    rng = np.random.default_rng(seed)
    z = sample_z(gen.input_dim, alpha, rng, size=n)
    out, _ = forward(gen, z)
    if side is None:
        side = int(round(math.sqrt(gen.output_dim)))
    return out.reshape(n, side, side)


_CKPT_MAGIC = b"GANW"


def save_generator(path, gen):
    """Binary checkpoint: ``GANW``, u32 layer count, then per layer u32
    rows, u32 cols, row-major f64 weights and f64 bias."""
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<I", len(gen.layers)))
        for layer in gen.layers:
            rows, cols = layer.weights.shape
            fh.write(struct.pack("<II", rows, cols))
            fh.write(np.ascontiguousarray(layer.weights, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(layer.bias, dtype="<f8").tobytes())


def load_generator(path):
    """Inverse of :func:`save_generator`.

    The format stores no activations; hidden layers are restored as ReLU
    and the last layer as tanh, the generator layout used by training.
    """
    data = open(path, "rb").read()
    if data[:4] != _CKPT_MAGIC:
        raise CorruptHeader(f"{path}: not a GANW checkpoint")
    (count,) = struct.unpack_from("<I", data, 4)
    pos = 8
    layers = []
    try:
        for i in range(count):
            rows, cols = struct.unpack_from("<II", data, pos)
            pos += 8
            w = np.frombuffer(data, "<f8", rows * cols, pos).reshape(rows, cols).copy()
            pos += 8 * rows * cols
            bias = np.frombuffer(data, "<f8", rows, pos).copy()
            pos += 8 * rows
            act = Activation.TANH if i == count - 1 else Activation.RELU
            layers.append(Layer(w, bias, act))
    except (struct.error, ValueError) as exc:
        raise CorruptHeader(f"{path}: truncated checkpoint") from exc
    if pos != len(data):
        raise CorruptHeader(f"{path}: {len(data) - pos} trailing bytes")
    return DenseNet(layers)


def load_config(path):
    with open(path) as fh:
        return GanConfig.from_dict(json.load(fh))

