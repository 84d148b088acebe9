"""Command-line interface: ``brnn <command> ...``.

Commands
--------
run     detect targets in a directory of frames
synth   render a synthetic scene with ground truth
eval    score a detection file against a truth file
tune    size, velocity or contrast tuning curve
oracle  closed-form temporal filter responses
roc     TPR/FPR sweep over detection thresholds
bench   per-frame processing time
"""

import argparse
import logging
import sys
import time
from dataclasses import asdict

import numpy as np

from . import io
from .config import ConfigError, RunConfig, parse_dth_rule, scene_from_file
from .detector import match_detections, match_threshold
from .experiments import DEFAULT_GAMMAS, TUNING_VARIABLES, roc_sweep, throughput, tuning_sweep
from .metrics import tpr_at_fpr, tpr_fpr
from .model import detections_table
from .synth import Scene
from .temporal import CascadeParams, extrema_times, impulse_response_analytic

log = logging.getLogger("brnn")


def _floats(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}") from None


def _size(text):
    try:
        return io.parse_size(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load_config(path):
    return RunConfig.from_file(path) if path else RunConfig.from_preset("default")


def _dump_kernels(model, directory):
    out = io.ensure_dir(directory)
    k = model.kernels_
    io.write_activation(out / "dog.png", k.dog)
    io.write_activation(out / "surround.png", k.surround)
    for i in range(len(k.even)):
        io.write_activation(out / f"gabor_even_{i}.png", k.even[i])
        io.write_activation(out / f"gabor_odd_{i}.png", k.odd[i])
    np.savez(out / "kernels.npz", dog=k.dog, even=k.even, odd=k.odd, surround=k.surround)


# -- commands -----------------------------------------------------------------


def cmd_run(args):
    cfg = _load_config(args.config)
    model = cfg.model()
    out = io.ensure_dir(args.out)
    if args.dump_kernels:
        _dump_kernels(model, args.dump_kernels)
    act_dir = io.ensure_dir(out / "activations") if args.dump_activations else None
    per_frame = []
    for t, frame in enumerate(io.iter_frames(args.frames, args.resize)):
        res = model.step(frame)
        per_frame.append(res.detections)
        if act_dir is not None:
            io.write_activation(act_dir / f"{t:06d}.png", res.ganglion.vi)
    dets = detections_table(per_frame)
    io.write_detections_csv(out / "detections.csv", dets, f"config={cfg.hash()}")
    io.write_detections_json(out / "detections.json", dets)
    (out / "config.ini").write_text(cfg.to_string())
    print(f"{len(per_frame)} frames, {len(dets)} detections -> {out / 'detections.csv'}")
    return 0


def cmd_synth(args):
    spec = scene_from_file(args.spec)
    scene = Scene(spec)
    out = io.ensure_dir(args.out)
    digits = max(4, len(str(spec.n_frames - 1)))
    for t in range(spec.n_frames):
        io.write_frame(out / f"{t:0{digits}d}.{args.format}", scene.render(t))
    io.write_truth_csv(out / "truth.csv", scene.truth)
    print(f"{spec.n_frames} frames of {spec.width}x{spec.height} -> {out}")
    return 0


def _px_per_deg(args):
    return args.width / args.fov


def cmd_eval(args):
    ratio, margin = parse_dth_rule(args.dth_rule)
    dets = io.read_detections_csv(args.detections)
    truth = io.read_truth_csv(args.truth)
    scale = _px_per_deg(args)
    by_frame = {}
    for d in dets:
        by_frame.setdefault(d.frame_index, []).append(d)
    n_frames = args.n_frames or (max(list(truth) + list(by_frame), default=-1) + 1)
    empty = (np.zeros((0, 2)), np.zeros(0))
    tp = fp = n_at = 0
    for t in range(n_frames):
        centres, sizes = truth.get(t, empty)
        a, b, _ = match_detections(by_frame.get(t, []), centres,
                                   match_threshold(sizes, scale, ratio, margin))
        tp, fp, n_at = tp + a, fp + b, n_at + len(centres)
    point = tpr_fpr(tp, n_at, fp, n_frames)
    print("frames,actual_targets,true_detections,false_positives,tpr,fpr")
    print(f"{n_frames},{n_at},{tp},{fp},{point.tpr:.6g},{point.fpr:.6g}")
    return 0


def cmd_tune(args):
    cfg = _load_config(args.config)
    grid, resp = tuning_sweep(args.var, args.grid, model=cfg.model(), normalize=args.normalize,
                              diameter=args.diameter, speed=args.speed, contrast=args.contrast,
                              n_frames=args.n_frames, warmup=args.warmup)
    rows = list(zip(grid.tolist(), resp.tolist()))
    if args.out:
        io.write_table(args.out, [args.var, "response"], rows, cfg.hash())
    print(f"{args.var},response")
    for g, r in rows:
        print(f"{g:g},{r:.6g}")
    return 0


def cmd_oracle(args):
    prm = CascadeParams(decay=args.decay, transmission=args.transmission, tau=args.tau,
                        gain=args.gain, offset=args.offset)
    header_hash = io.config_hash(asdict(prm))
    if args.extrema:
        header = ["n", "t_max", "t_min"]
        rows = [[n, *map(float, extrema_times(prm.a, prm.b, n))] for n in args.n]
    else:
        t = np.arange(0.0, args.duration + args.step / 2, args.step)
        header = ["t"] + [f"n{n}" for n in args.n]
        cols = [impulse_response_analytic(prm, n, t) for n in args.n]
        rows = [[float(t[i])] + [float(c[i]) for c in cols] for i in range(len(t))]
    if args.out:
        io.write_table(args.out, header, rows, header_hash)
    else:
        print(",".join(header))
        for r in rows:
            print(",".join(f"{v:.10g}" if isinstance(v, float) else str(v) for v in r))
    return 0


def cmd_roc(args):
    cfg = _load_config(args.config)
    if args.dth_rule:
        cfg.dth_ratio, cfg.dth_margin_deg = parse_dth_rule(args.dth_rule)
    frames = io.read_frames(args.frames, args.resize)
    truth = io.read_truth_csv(args.truth)
    scale = cfg.px_per_deg(frames.shape[2])
    variants = (False, True) if args.compare else (bool(cfg.params()["inhibition"]),)
    curves = roc_sweep(cfg.model(), frames, truth, scale, gammas=args.gammas,
                       inhibition=variants, ratio=cfg.dth_ratio, margin_deg=cfg.dth_margin_deg)
    rows = [[int(inh), p.gamma, p.tpr, p.fpr] for inh, pts in curves.items() for p in pts]
    header = ["inhibition", "gamma", "tpr", "fpr"]
    if args.out:
        io.write_table(args.out, header, rows, cfg.hash())
    print(",".join(header))
    for r in rows:
        print(f"{r[0]},{r[1]:g},{r[2]:.6g},{r[3]:.6g}")
    for inh, pts in curves.items():
        print(f"# inhibition={int(inh)} TPR at FPR={args.at_fpr:g}: "
              f"{tpr_at_fpr(pts, args.at_fpr):.4f}")
    return 0


def cmd_bench(args):
    cfg = _load_config(args.config)
    w, h = args.size
    mean, std = throughput(cfg.model(), shape=(h, w), n_frames=args.n_frames)
    rows = [[w, h, args.n_frames, mean, std, time.strftime("%Y-%m-%dT%H:%M:%S")]]
    header = ["width", "height", "frames", "mean_s", "std_s", "timestamp"]
    if args.out:
        io.write_table(args.out, header, rows, cfg.hash())
    print(f"{w}x{h}: {mean:.4f} +- {std:.4f} s/frame")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="brnn", description="Small moving target detector.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="detect targets in a directory of frames")
    r.add_argument("--frames", required=True, help="directory of .pgm/.png frames")
    r.add_argument("--config", help="run config file (defaults when omitted)")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--dump-activations", action="store_true",
                   help="write the final ganglion map of each frame as an image")
    r.add_argument("--dump-kernels", metavar="DIR", help="write the filter kernels to DIR")
    r.add_argument("--resize", type=_size, metavar="WxH", help="resample frames first")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("synth", help="render a synthetic scene with ground truth")
    s.add_argument("--spec", required=True, help="scene spec file")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--format", choices=("png", "pgm"), default="png")
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("eval", help="score detections against ground truth")
    e.add_argument("--detections", required=True, help="detections CSV from `run`")
    e.add_argument("--truth", required=True, help="truth CSV")
    e.add_argument("--dth-rule", default="0.5d+1",
                   help="match radius as RATIOd+MARGIN, margin in degrees (default 0.5d+1)")
    e.add_argument("--fov", type=float, default=32.0, help="horizontal field of view, degrees")
    e.add_argument("--width", type=int, default=128, help="frame width in pixels")
    e.add_argument("--n-frames", type=int, help="sequence length (default: last frame seen)")
    e.set_defaults(func=cmd_eval)

    t = sub.add_parser("tune", help="tuning curve on synthetic single-target scenes")
    t.add_argument("--var", required=True, choices=TUNING_VARIABLES)
    t.add_argument("--grid", required=True, type=_floats, help="values, e.g. '1,2,3,4'")
    t.add_argument("--config", help="run config file")
    t.add_argument("--diameter", type=float, default=3.0, help="degrees")
    t.add_argument("--speed", type=float, default=300.0, help="degrees per second")
    t.add_argument("--contrast", type=float, default=1.0)
    t.add_argument("--n-frames", type=int, default=90)
    t.add_argument("--warmup", type=int, default=20)
    t.add_argument("--normalize", action="store_true", help="min-max scale the curve")
    t.add_argument("--out", help="CSV file")
    t.set_defaults(func=cmd_tune)

    o = sub.add_parser("oracle", help="closed-form temporal filter responses")
    mode = o.add_mutually_exclusive_group(required=True)
    mode.add_argument("--impulse", action="store_true", help="impulse response table")
    mode.add_argument("--extrema", action="store_true", help="times of the extrema")
    o.add_argument("--n", type=int, nargs="+", default=[2, 3, 4, 5], help="tap indices")
    o.add_argument("--decay", type=float, default=60.0)
    o.add_argument("--transmission", type=float, default=60.0)
    o.add_argument("--tau", type=float, default=8.0)
    o.add_argument("--gain", type=float, default=5.0)
    o.add_argument("--offset", type=int, default=1)
    o.add_argument("--duration", type=float, default=1.0, help="seconds")
    o.add_argument("--step", type=float, default=0.001, help="seconds")
    o.add_argument("--out", help="CSV file (stdout when omitted)")
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("roc", help="TPR/FPR over a threshold sweep")
    c.add_argument("--frames", required=True)
    c.add_argument("--truth", required=True)
    c.add_argument("--config")
    c.add_argument("--gammas", type=_floats, default=list(DEFAULT_GAMMAS))
    c.add_argument("--dth-rule", help="override the config's match rule")
    c.add_argument("--resize", type=_size, metavar="WxH")
    c.add_argument("--compare", action="store_true",
                   help="evaluate with and without directional inhibition")
    c.add_argument("--at-fpr", type=float, default=5.0, help="report TPR at this FPR")
    c.add_argument("--out", help="CSV file")
    c.set_defaults(func=cmd_roc)

    b = sub.add_parser("bench", help="per-frame processing time")
    b.add_argument("--config")
    b.add_argument("--size", type=_size, default=(320, 240), metavar="WxH")
    b.add_argument("--n-frames", type=int, default=20)
    b.add_argument("--out", help="timing CSV")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"brnn {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
