"""Small dense networks with explicit forward/backward passes and Adam."""

import enum
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import DimMismatch

__all__ = ["Activation", "Layer", "DenseNet", "orthogonal", "build_net", "forward", "backward", "Adam"]


class Activation(str, enum.Enum):
    RELU = "relu"
    TANH = "tanh"
    IDENTITY = "identity"


@dataclass
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: Activation = Activation.RELU


@dataclass
class DenseNet:
    layers: list = field(default_factory=list)

    def __post_init__(self):
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.weights.shape[0] != nxt.weights.shape[1]:
                raise DimMismatch(
                    f"layer output {prev.weights.shape[0]} does not feed input {nxt.weights.shape[1]}"
                )

    @property
    def input_dim(self):
        return self.layers[0].weights.shape[1]

    @property
    def output_dim(self):
        return self.layers[-1].weights.shape[0]

    def params(self):
        """Flat list of parameter arrays, (W0, b0, W1, b1, ...)."""
        out = []
        for layer in self.layers:
            out.extend((layer.weights, layer.bias))
        return out

    def copy(self):
        return DenseNet([Layer(l.weights.copy(), l.bias.copy(), l.activation) for l in self.layers])


def orthogonal(rows, cols, rng, gain=1.0):
    """Orthogonal initialization (rows or columns orthonormal, whichever fits)."""
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return gain * q[:rows, :cols]


def build_net(dims, rng, hidden=Activation.RELU, final=Activation.IDENTITY):
    layers = []
    for i, (d_in, d_out) in enumerate(zip(dims[:-1], dims[1:])):
        act = final if i == len(dims) - 2 else hidden
        layers.append(Layer(orthogonal(d_out, d_in, rng), np.zeros(d_out), Activation(act)))
    return DenseNet(layers)


def _act(z, kind):
    if kind is Activation.RELU:
        return np.maximum(z, 0.0)
    if kind is Activation.TANH:
        return np.tanh(z)
    return z


def _act_grad(z, y, kind):
    if kind is Activation.RELU:
        # subgradient 0 at z == 0
        return (z > 0.0).astype(z.dtype)
    if kind is Activation.TANH:
        return 1.0 - y * y
    return np.ones_like(z)


def forward(net, x):
    """Run ``net`` on a vector or a batch (rows are samples).

    Returns ``(y, tape)``; ``tape`` holds what :func:`backward` needs.
    """
    h = np.asarray(x, dtype=np.float64)
    single = h.ndim == 1
    if single:
        h = h[None, :]
    if h.shape[1] != net.input_dim:
        raise DimMismatch(f"input has {h.shape[1]} features, net expects {net.input_dim}")
    tape = []
    for layer in net.layers:
        z = h @ layer.weights.T + layer.bias
        y = _act(z, layer.activation)
        tape.append((h, z, y))
        h = y
    return (h[0] if single else h), (tape, single)


def backward(net, tape, dy):
    """Backpropagate ``dy`` (gradient w.r.t. the output).

    Returns ``(dx, grads)`` with ``grads`` a list of ``(dW, db)`` per layer,
    summed over the batch.
    """
    records, single = tape
    g = np.asarray(dy, dtype=np.float64)
    if single:
        g = g[None, :]
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        h, z, y = records[i]
        g = g * _act_grad(z, y, layer.activation)
        grads[i] = (g.T @ h, g.sum(axis=0))
        g = g @ layer.weights
    return (g[0] if single else g), grads


class Adam:
    """Adam over a fixed list of arrays, updated in place."""

    def __init__(self, params, lr, beta1=0.0, beta2=0.9, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
