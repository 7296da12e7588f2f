"""The vckit command line: every pipeline stage as one subcommand.

Exit codes: 0 success, 2 usage (unknown flags or subcommands, argparse),
1 domain failures, printed to stderr as one CATEGORY/message line.
"""

from __future__ import annotations

import argparse
import os
import sys

from .dsp.griffinlim import griffin_lim_vocode
from .dsp.melspec import MelConfig, mel_spectrogram, read_melf, write_melf
from .dsp.psdr import psdr_shift
from .dsp.waveform import peak_normalize
from .dsp.wavio import read_wav, write_wav
from .errors import ConfigError, VcError
from .evalmetrics import (
    THRESHOLDS,
    compute_eer,
    read_pairs,
    score_pairs,
    sv_accuracy,
    write_report,
)
from .models.mediumvc import mvc_convert
from .models.singlevc import sv_convert
from .train.loop import build_medium_from_ckpt, build_single_from_ckpt
from .train.toydata import make_toy_corpus


def _cmd_psdr(args) -> int:
    wave = read_wav(args.infile)
    shifted = psdr_shift(wave, args.semitones, force=args.force)
    write_wav(args.out, shifted)
    return 0


def _prep_one(job: tuple[str, str]) -> str:
    src, dst = job
    mel = mel_spectrogram(peak_normalize(read_wav(src)), MelConfig())
    write_melf(dst, mel)
    return os.path.basename(dst)


def _cmd_prep(args) -> int:
    if not os.path.isdir(args.corpus):
        raise ConfigError(f"corpus directory not found: {args.corpus}")
    names = sorted(n for n in os.listdir(args.corpus) if n.lower().endswith(".wav"))
    if not names:
        raise ConfigError(f"no WAV files in {args.corpus}")
    os.makedirs(args.out, exist_ok=True)
    jobs = [
        (os.path.join(args.corpus, n),
         os.path.join(args.out, os.path.splitext(n)[0] + ".melf"))
        for n in names
    ]
    if args.jobs > 1:
        from multiprocessing import Pool

        with Pool(args.jobs) as pool:
            done = pool.map(_prep_one, jobs)
    else:
        done = [_prep_one(j) for j in jobs]
    print(f"wrote {len(done)} mel files to {args.out}")
    return 0


def _cmd_make_toy_corpus(args) -> int:
    entries = make_toy_corpus(args.out, args.speakers, args.utts_per_speaker, args.seed)
    print(f"wrote {len(entries)} utterances to {args.out}")
    return 0


def _read_config(path: str) -> str:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as f:
        return f.read()


def _cmd_train_single(args) -> int:
    from .train.loop import train_single

    _, losses = train_single(args.corpus, _read_config(args.config), args.out,
                             resume=args.resume)
    if losses:
        print(f"trained to step {len(losses)} (last loss {losses[-1]:.6f}); "
              f"checkpoint in {args.out}")
    else:
        print(f"nothing to do; checkpoint in {args.out}")
    return 0


def _cmd_train_medium(args) -> int:
    from .train.loop import train_medium

    _, losses, _ = train_medium(
        args.corpus,
        _read_config(args.config),
        args.out,
        single_ckpt=args.single_ckpt,
        mode=args.mode,
        resume=args.resume,
    )
    if losses:
        print(f"trained to step {len(losses)} (last loss {losses[-1]:.6f}); "
              f"checkpoint in {args.out}")
    else:
        print(f"nothing to do; checkpoint in {args.out}")
    return 0


def _warn_untrained(manifest: dict) -> None:
    if manifest.get("step", 0) == 0:
        print("warning: checkpoint was saved at step 0 (untrained weights)",
              file=sys.stderr)


def _cmd_convert_single(args) -> int:
    model, manifest = build_single_from_ckpt(args.ckpt)
    _warn_untrained(manifest)
    out = sv_convert(read_wav(args.infile), model, MelConfig())
    write_wav(args.out, out)
    return 0


def _cmd_convert(args) -> int:
    medium, manifest = build_medium_from_ckpt(args.ckpt)
    _warn_untrained(manifest)
    single = None
    if medium.cfg.mode != "mwos":
        if args.single_ckpt is None:
            raise ConfigError(
                f"mode {medium.cfg.mode!r} requires --single-ckpt"
            )
        single, _ = build_single_from_ckpt(
            args.single_ckpt, load_weights=(medium.cfg.mode == "full")
        )
    out = mvc_convert(
        read_wav(args.src),
        read_wav(args.ref),
        medium,
        single,
        MelConfig(),
        roundtrip_audio=args.roundtrip_audio,
    )
    write_wav(args.out, out)
    return 0


def _parse_threshold(raw: str) -> float:
    if raw.lower() in THRESHOLDS:
        return THRESHOLDS[raw.lower()]
    try:
        return float(raw)
    except ValueError:
        names = "|".join(sorted(THRESHOLDS))
        raise ConfigError(f"threshold must be a number or one of {names}") from None


def _cmd_eval_sv(args) -> int:
    threshold = _parse_threshold(args.threshold)
    pairs = score_pairs(read_pairs(args.pairs))
    acc = sv_accuracy(pairs, threshold)
    text = write_report(args.out, {
        "sv_accuracy": f"{acc:.6f}",
        "n_pairs": len(pairs),
        "threshold": f"{threshold:.6f}",
    })
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _cmd_eval_eer(args) -> int:
    pos = [p.score for p in score_pairs(read_pairs(args.pos))]
    neg = [p.score for p in score_pairs(read_pairs(args.neg))]
    eer, thr = compute_eer(pos, neg)
    text = write_report(args.out, {
        "eer": f"{eer:.6f}",
        "threshold": f"{thr:.6f}",
        "n_pos": len(pos),
        "n_neg": len(neg),
    })
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _cmd_vocode(args) -> int:
    mel = read_melf(args.mel)
    wave = griffin_lim_vocode(mel, MelConfig())
    write_wav(args.out, wave)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vckit",
        description="Two-stage any-to-any voice conversion toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("psdr", help="pitch-shift a WAV, duration preserved")
    p.add_argument("--in", dest="infile", required=True, metavar="WAV")
    p.add_argument("--semitones", type=int, required=True)
    p.add_argument("--out", required=True, metavar="WAV")
    p.add_argument("--force", action="store_true",
                   help="allow shifts outside the validated range")
    p.set_defaults(func=_cmd_psdr)

    p = sub.add_parser("prep", help="normalize and mel-analyze a corpus")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_prep)

    p = sub.add_parser("make-toy-corpus", help="generate the synthetic corpus")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--speakers", type=int, default=4)
    p.add_argument("--utts-per-speaker", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=_cmd_make_toy_corpus)

    p = sub.add_parser("train-single", help="train the any-to-one model")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="CKPT_DIR")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=_cmd_train_single)

    p = sub.add_parser("train-medium", help="train the any-to-any model")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--single-ckpt", metavar="CKPT_DIR")
    p.add_argument("--mode", choices=("full", "mwus", "mwos"))
    p.add_argument("--out", required=True, metavar="CKPT_DIR")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=_cmd_train_medium)

    p = sub.add_parser("convert-single", help="convert speech to the single voice")
    p.add_argument("--ckpt", required=True, metavar="CKPT_DIR")
    p.add_argument("--in", dest="infile", required=True, metavar="WAV")
    p.add_argument("--out", required=True, metavar="WAV")
    p.set_defaults(func=_cmd_convert_single)

    p = sub.add_parser("convert", help="convert src speech into ref's voice")
    p.add_argument("--ckpt", required=True, metavar="CKPT_DIR")
    p.add_argument("--single-ckpt", metavar="CKPT_DIR")
    p.add_argument("--src", required=True, metavar="WAV")
    p.add_argument("--ref", required=True, metavar="WAV")
    p.add_argument("--out", required=True, metavar="WAV")
    p.add_argument("--roundtrip-audio", action="store_true",
                   help="vocode and re-analyze the intermediate features")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("eval-sv", help="cosine SV accuracy over a pair list")
    p.add_argument("--pairs", required=True, metavar="CSV")
    p.add_argument("--threshold", required=True,
                   help="numeric threshold or vctk|librispeech|vcc2020")
    p.add_argument("--out", metavar="CSV")
    p.set_defaults(func=_cmd_eval_sv)

    p = sub.add_parser("eval-eer", help="equal error rate from scored pairs")
    p.add_argument("--pos", required=True, metavar="CSV")
    p.add_argument("--neg", required=True, metavar="CSV")
    p.add_argument("--out", metavar="CSV")
    p.set_defaults(func=_cmd_eval_eer)

    p = sub.add_parser("vocode", help="Griffin-Lim a stored mel to audio")
    p.add_argument("--mel", required=True, metavar="MELF")
    p.add_argument("--out", required=True, metavar="WAV")
    p.set_defaults(func=_cmd_vocode)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VcError as exc:
        print(f"{exc.category}/{exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"CONFIG/{exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
