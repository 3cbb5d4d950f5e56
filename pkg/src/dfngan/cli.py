"""``dfngan`` command line front end.

Structured results go to stdout as JSON (or a bare number for ``snr`` and
``monitor``); grids, audio, traces and checkpoints go to the files named by
flags. Domain errors exit 1 after printing ``error: <code>: <detail>`` on
stderr; usage errors exit 2.
"""

import argparse
import json
import sys
import time

import numpy as np

from .dfn import DfnMethod, GoeConfig, dfn_exact, dfn_fast
from .exceptions import DfnganError, NumericalDivergence
from .gan_toy.monitor import detect_collapse
from .gan_toy.sampling import synth_dataset
from .gan_toy.train import GanConfig, TrainTrace, fit_gan, load_config, save_generator
from .linalg import real_schur, top_singular_triplet
from .matrix_io import load_matrix, save_matrix
from .regularizers import (
    STOP_GRAD_SECOND,
    orthogonal_penalty_v1,
    orthogonal_penalty_v2,
    spectral_clamp_update,
)
from .signal import (
    SpecKind,
    cwt_morlet,
    read_spg,
    read_wav,
    reconstruct,
    snr_db,
    stft,
    visualize,
    write_spg,
    write_wav,
)
from .signal.audio import AudioBuffer

# samples in the synthetic training set used by train-toy
TRAIN_SET_SIZE = 512


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _cmd_schur(args):
    x = load_matrix(args.input)
    form = real_schur(x, tol=args.tol)
    q, t = form.q, form.t
    norm = max(np.linalg.norm(x), np.finfo(float).tiny)
    _emit({
        "eigenvalues": [[float(v.real), float(v.imag)] for v in form.eigenvalues],
        "residual": float(np.linalg.norm(q @ t @ q.T - x) / norm),
        "orthogonality": float(np.linalg.norm(q.T @ q - np.eye(len(q)))),
        "t": t.tolist(),
        "q": q.tolist(),
    })


def _cmd_dfn(args):
    x = load_matrix(args.input)
    if DfnMethod.parse(args.method) is DfnMethod.EXACT:
        report = dfn_exact(x)
    else:
        report = dfn_fast(x, GoeConfig(num_phase_offsets=args.offsets, seed=args.seed))
    _emit(report.to_dict())


def _cmd_spec(args):
    buf = read_wav(args.input)
    if args.transform == "stft":
        spec = stft(buf, args.nfft, args.hop)
    else:
        spec = cwt_morlet(buf, args.scales)
    if args.vis != "none":
        spec = visualize(spec, args.vis)
    write_spg(args.out, spec)
    _emit({"rows": spec.shape[0], "cols": spec.shape[1], "kind": spec.kind.name.lower()})


def _cmd_reconstruct(args):
    vis = read_spg(args.input)
    ph = read_spg(args.phase)
    # a complex grid supplies its own angle; a real grid is taken as radians
    phase = np.angle(ph.complex) if ph.kind in (SpecKind.STFT_COMPLEX, SpecKind.CWT_COMPLEX) \
        else ph.re
    out = reconstruct(vis, phase)
    write_wav(args.out, AudioBuffer.clipped(out.samples, out.sample_rate))
    _emit({"samples": len(out.samples), "sample_rate": out.sample_rate})


def _cmd_snr(args):
    value = snr_db(read_wav(args.reference), read_wav(args.test))
    sys.stdout.write(f"{value!r}\n")


def _cmd_regularize(args):
    theta = load_matrix(args.input)
    sigma_before = top_singular_triplet(theta)[0]
    if args.reg in ("spectral", "spectral-sg"):
        level = STOP_GRAD_SECOND if args.reg == "spectral-sg" else args.sigma_clamp
        result = spectral_clamp_update(theta, level)
        value = max(0.0, sigma_before - top_singular_triplet(result)[0])
    else:
        penalty = orthogonal_penalty_v1 if args.reg == "ortho-v1" else orthogonal_penalty_v2
        res = penalty(theta, args.beta)
        result = theta - args.step * res.gradient
        value = res.value
    if args.out:
        save_matrix(args.out, result)
    _emit({
        "value": float(value),
        "sigma0_before": float(sigma_before),
        "sigma0_after": float(top_singular_triplet(result)[0]),
    })


def _cmd_train_toy(args):
    cfg = load_config(args.config) if args.config else GanConfig()
    if args.seed is not None:
        cfg = GanConfig.from_dict({**cfg.to_dict(), "seed": args.seed})
    data = synth_dataset(TRAIN_SET_SIZE, cfg.sample_side, seed=cfg.seed)
    res = fit_gan(cfg, data, clock=time.perf_counter if args.timing else None)
    res.trace.to_csv(args.out)
    if args.ckpt:
        save_generator(args.ckpt, res.generator)
    if res.trace.diverged:
        raise NumericalDivergence(f"losses became non-finite at iteration {res.trace.rows[-1].iter}")
    _emit({
        "iters": len(res.trace),
        "terminal_diff_dfn": res.trace.terminal_diff_dfn(),
    })


def _cmd_monitor(args):
    onset = detect_collapse(TrainTrace.from_csv(args.trace), args.window, args.slope)
    sys.stdout.write(("none" if onset is None else str(onset)) + "\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized components (default 0)")
    parser = argparse.ArgumentParser(prog="dfngan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("schur", parents=[common], help="real Schur form of a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=_cmd_schur)

    p = sub.add_parser("dfn", parents=[common], help="departure from normality")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["exact", "fast", "fast_goe"], default="exact")
    p.add_argument("--offsets", type=int, choices=[1, 4], default=4)
    p.set_defaults(func=_cmd_dfn)

    p = sub.add_parser("spec", parents=[common], help="spectrogram of a WAV file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--transform", choices=["stft", "cwt"], default="stft")
    p.add_argument("--vis", choices=["linear", "log", "logreal", "none"], default="log")
    p.add_argument("--nfft", type=int, default=2048)
    p.add_argument("--hop", type=int, default=1024)
    p.add_argument("--scales", type=int, default=128)
    p.set_defaults(func=_cmd_spec)

    p = sub.add_parser("reconstruct", parents=[common], help="audio from magnitude and phase")
    p.add_argument("--input", required=True)
    p.add_argument("--phase", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("snr", parents=[common], help="SNR in dB of test against reference")
    p.add_argument("reference")
    p.add_argument("test")
    p.set_defaults(func=_cmd_snr)

    p = sub.add_parser("regularize", parents=[common], help="apply a weight regularizer")
    p.add_argument("--input", required=True)
    p.add_argument("--reg", required=True,
                   choices=["spectral", "spectral-sg", "ortho-v1", "ortho-v2"])
    p.add_argument("--sigma-clamp", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1e-4)
    p.add_argument("--step", type=float, default=1.0,
                   help="gradient step for the orthogonal penalties")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_regularize)

    p = sub.add_parser("train-toy", parents=[common], help="train the toy GAN")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--ckpt")
    p.add_argument("--timing", action="store_true", help="record wall time per iteration")
    p.set_defaults(func=_cmd_train_toy)

    p = sub.add_parser("monitor", parents=[common], help="collapse onset in a trace")
    p.add_argument("trace")
    p.add_argument("--window", type=int, default=50)
    p.add_argument("--slope", type=float, default=0.5)
    p.set_defaults(func=_cmd_monitor)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command != "train-toy" and args.seed is None:
        args.seed = 0
    try:
        args.func(args)
    except DfnganError as exc:
        sys.stderr.write(f"error: {exc.code}: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: IOError: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"error: InvalidArgument: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
