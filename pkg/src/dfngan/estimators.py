"""scikit-learn style wrappers around the functional core.

All three estimators follow the usual contract: hyperparameters are stored
verbatim in ``__init__``, learned state gets a trailing underscore, and
``check_is_fitted`` guards every method that needs it.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_square_batch
from .dfn import DfnMethod, GoeConfig, dfn_exact, dfn_fast
from .exceptions import EmptyBatch
from .gan_toy.train import GanConfig, fit_gan, generate
from .signal.audio import CANONICAL_RATE, AudioBuffer
from .signal.spectrogram import cwt_morlet, stft, visualize


class DFNTransformer(TransformerMixin, BaseEstimator):
    """Map each square matrix in a batch to its departure from normality.

    Parameters
    ----------
    method : {"exact", "fast_goe"}
    num_phase_offsets : {1, 4}
        Pooling phases averaged by the fast surrogate.
    clamp_nonneg : bool
        Clamp negative fast estimates to zero.

    Attributes
    ----------
    reference_dfn_ : float
        Mean DFN of the batch passed to ``fit``.
    n_features_in_ : int
        Side length of the fitted matrices.
    """

    def __init__(self, method="exact", num_phase_offsets=4, clamp_nonneg=True):
        self.method = method
        self.num_phase_offsets = num_phase_offsets
        self.clamp_nonneg = clamp_nonneg

    def _values(self, X):
        batch = check_square_batch(X, "X")
        method = DfnMethod.parse(self.method)
        if method is DfnMethod.EXACT:
            return np.array([dfn_exact(m).value for m in batch]), batch.shape[1]
        cfg = GoeConfig(num_phase_offsets=self.num_phase_offsets, clamp_nonneg=self.clamp_nonneg)
        return np.array([dfn_fast(m, cfg).value for m in batch]), batch.shape[1]

    def fit(self, X, y=None):
        values, n = self._values(X)
        # left-to-right sum keeps the mean independent of batch chunking
        total = 0.0
        for v in values:
            total += v
        self.reference_dfn_ = total / len(values)
        self.n_features_in_ = n
        return self

    def transform(self, X):
        """Return an ``(m, 1)`` column of DFN values."""
        check_is_fitted(self, "reference_dfn_")
        values, _ = self._values(X)
        return values[:, None]

    def score(self, X, y=None):
        """Negative absolute gap between the batch mean DFN and the reference."""
        values = self.transform(X)[:, 0]
        total = 0.0
        for v in values:
            total += v
        return -abs(total / len(values) - self.reference_dfn_)


class SpectrogramTransformer(TransformerMixin, BaseEstimator):
    """Turn 1-D signals into visualized time-frequency grids.

    ``transform`` returns a list of 2-D arrays, one per signal, because
    signals of different lengths give grids with different frame counts.

    Parameters
    ----------
    kind : {"stft", "cwt"}
    vis : {"linear", "log", "logreal"}
    nfft, hop : int
        STFT frame length and hop.
    num_scales : int
        Morlet scales for the CWT.
    """

    def __init__(self, kind="stft", vis="log", nfft=2048, hop=1024, num_scales=128,
                 sample_rate=CANONICAL_RATE):
        self.kind = kind
        self.vis = vis
        self.nfft = nfft
        self.hop = hop
        self.num_scales = num_scales
        self.sample_rate = sample_rate

    def fit(self, X, y=None):
        if self.kind not in ("stft", "cwt"):
            raise ValueError("kind must be 'stft' or 'cwt'")
        if self.vis not in ("linear", "log", "logreal"):
            raise ValueError("vis must be 'linear', 'log' or 'logreal'")
        self.n_signals_seen_ = len(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_signals_seen_")
        if len(X) == 0:
            raise EmptyBatch("no signals to transform")
        out = []
        for x in X:
            buf = AudioBuffer(np.asarray(x, dtype=np.float64), self.sample_rate)
            if self.kind == "stft":
                spec = stft(buf, self.nfft, self.hop)
            else:
                spec = cwt_morlet(buf, self.num_scales)
            out.append(visualize(spec, self.vis).re)
        return out


class ToyGAN(BaseEstimator):
    """Dense hinge GAN with an optional difference-DFN generator penalty.

    Hyperparameters mirror :class:`~dfngan.gan_toy.GanConfig`. ``fit``
    takes a list of square samples; ``sample`` draws from the trained
    generator.

    Attributes
    ----------
    generator_ : DenseNet
    discriminator_ : DenseNet
    trace_ : TrainTrace
    """

    def __init__(self, z_dim=16, hidden=128, batch=64, lr_d=2e-4, lr_g=3e-5, dfn_weight=0.1,
                 dfn_method="exact", truncation=0.0, sigma_clamp=1.0, ortho_reg="off",
                 ortho_beta=1e-4, max_iters=2000, seed=0):
        self.z_dim = z_dim
        self.hidden = hidden
        self.batch = batch
        self.lr_d = lr_d
        self.lr_g = lr_g
        self.dfn_weight = dfn_weight
        self.dfn_method = dfn_method
        self.truncation = truncation
        self.sigma_clamp = sigma_clamp
        self.ortho_reg = ortho_reg
        self.ortho_beta = ortho_beta
        self.max_iters = max_iters
        self.seed = seed

    def fit(self, X, y=None):
        data = check_square_batch(X, "X")
        cfg = GanConfig(sample_side=data.shape[1], **self.get_params())
        res = fit_gan(cfg, list(data), clock=None)
        self.generator_ = res.generator
        self.discriminator_ = res.discriminator
        self.trace_ = res.trace
        self.side_ = data.shape[1]
        return self

    def sample(self, n, alpha=None, seed=None):
        """Draw ``n`` samples; ``alpha`` defaults to the training truncation."""
        check_is_fitted(self, "generator_")
        alpha = self.truncation if alpha is None else alpha
        seed = self.seed if seed is None else seed
        return generate(self.generator_, n, alpha, seed, self.side_)
