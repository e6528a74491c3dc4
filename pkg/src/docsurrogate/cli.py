"""Command-line entry point: ``docsurrogate <command> ...``.

Exit codes: 0 success, 1 numerical/domain failure, 2 usage or file error.
Errors print one ``docsurrogate: error: <Kind>: <message>`` line to stderr.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
import warnings

import numpy as np

from . import __version__, dataset, metrics
from .binarize import DEFAULT_K_BOUNDS, DEFAULT_WINDOW_BOUNDS, SauvolaParams, auto_binarize, sauvola
from .errors import DomainError, InputError
from .imaging import load_binary, load_gray, save_binary
from .surrogates import MODEL_TYPES, evaluate, fit_model, load_model, save_model

log = logging.getLogger("docsurrogate")

PROG = "docsurrogate"


class UsageError(InputError):
    pass


def _err(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------- commands


def cmd_metrics(args):
    pred = load_binary(args.pred)
    gt = load_binary(args.gt)
    report = metrics.all_metrics(pred, gt)
    print(metrics.MetricReport.CSV_HEADER)
    print(report.csv_row(args.id or os.path.splitext(os.path.basename(args.pred))[0]))


def cmd_build(args):
    from .pipeline import rows_from_manifest

    entries = dataset.read_manifest(args.manifest)
    params = SauvolaParams(args.window, args.k) if args.window is not None else None
    rows, skipped = rows_from_manifest(entries, sauvola_params=params)
    dataset.write_features_csv(rows, args.out)
    log.info("wrote %d rows to %s (%d skipped)", len(rows), args.out, len(skipped))


def _fit_kwargs(args):
    kind = args.model
    kw = {}
    if kind in ("svr", "ensemble"):
        key = "svr_budget" if kind == "ensemble" else "budget"
        kw[key] = args.svr_budget
    if kind in ("ann", "ensemble"):
        kw["hidden"] = args.hidden
        kw["max_epochs"] = args.epochs
    return kw


def cmd_train(args):
    rows = dataset.read_features_csv(args.features)
    if not rows:
        raise UsageError(f"{args.features}: no rows to train on")
    ts = dataset.TrainingSet.from_rows(rows)
    t0 = time.perf_counter()
    model = fit_model(args.model, ts, seed=args.seed, **_fit_kwargs(args))
    elapsed = time.perf_counter() - t0
    save_model(model, args.out)
    _err(f"training_time_s={elapsed:.4f}")


def cmd_predict(args):
    model = load_model(args.model)
    rows = dataset.read_features_csv(args.features)
    t0 = time.perf_counter()
    if rows:
        preds = np.asarray(model.predict([r.inputs for r in rows]), dtype=float).ravel()
    else:
        preds = np.zeros(0)
    elapsed = time.perf_counter() - t0
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["id", "prediction"])
        for r, p in zip(rows, preds):
            w.writerow([r.id, repr(float(p))])
    finally:
        if args.out:
            out.close()
    outside = [r.id for r, p in zip(rows, preds) if not 0.0 <= p <= 100.0]
    if outside:
        log.warning("%d prediction(s) outside [0, 100]: %s", len(outside), " ".join(outside[:10]))
    _err(f"prediction_time_s={elapsed:.4f}")


def _read_column(path, names):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    with fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        col = next((n for n in names if n in fields), None)
        if "id" not in fields or col is None:
            raise UsageError(f"{path}: need columns id and one of {', '.join(names)}")
        out = {}
        for row in reader:
            try:
                out[row["id"]] = float(row[col])
            except (TypeError, ValueError):
                raise UsageError(f"{path}:{reader.line_num}: non-numeric {col}") from None
    return out


def cmd_evaluate(args):
    pred = _read_column(args.predictions, ("prediction",))
    actual = _read_column(args.targets, ("f_measure_target", "target"))
    ids = [i for i in pred if i in actual]
    missing = sorted(set(pred) ^ set(actual))
    if missing:
        log.warning("%d id(s) present in only one file, ignored", len(missing))
    report = evaluate([pred[i] for i in ids], [actual[i] for i in ids])
    print(report.CSV_HEADER)
    print(report.csv_row())


def cmd_auto_binarize(args):
    img = load_gray(args.image)
    model = load_model(args.model)
    result = auto_binarize(
        img,
        model,
        window_bounds=(args.min_window, args.max_window),
        k_bounds=(args.min_k, args.max_k),
        budget=args.budget,
        seed=args.seed,
    )
    save_binary(result.binary, args.out)
    trace = args.trace or os.path.splitext(args.out)[0] + "_trace.csv"
    result.write_trace(trace)
    print(f"window={result.params.window} k={result.params.k:.6f} predicted_f_measure={result.predicted:.6f}")


def cmd_synth(args):
    from . import synthetic

    corpus = synthetic.make_corpus(args.count, seed=args.seed, height=args.height, width=args.width)
    processed = None
    if args.window is not None:
        params = SauvolaParams(args.window, args.k)
        processed = {doc_id: sauvola(gray, params) for doc_id, gray, _ in corpus}
    path = synthetic.write_corpus(corpus, args.outdir, processed)
    log.info("wrote %d documents and %s", len(corpus), path)


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("metrics", parents=[common], help="F-Measure, PSNR, DRD and NRM of a binarization")
    s.add_argument("pred", help="binarized image (PBM/PGM/PNG)")
    s.add_argument("gt", help="ground-truth image")
    s.add_argument("--id", default=None, help="row id (default: prediction file stem)")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("build", parents=[common], help="feature table from a manifest")
    s.add_argument("manifest", help="CSV with header id,original,processed,gt")
    s.add_argument("out", help="output feature CSV")
    s.add_argument("--window", type=int, default=None,
                   help="binarize entries lacking a processed image with Sauvola at this window")
    s.add_argument("--k", type=float, default=0.2)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("train", parents=[common], help="fit a surrogate model")
    s.add_argument("features", help="feature CSV with targets")
    s.add_argument("--model", choices=MODEL_TYPES, default="svr")
    s.add_argument("--out", required=True, help="model file to write")
    s.add_argument("--svr-budget", type=int, default=30, help="Bayesian-optimization evaluations for SVR tuning")
    s.add_argument("--hidden", type=int, default=10, help="ANN hidden units")
    s.add_argument("--epochs", type=int, default=100, help="ANN Levenberg-Marquardt epochs")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", parents=[common], help="predict F-Measure for feature rows")
    s.add_argument("model")
    s.add_argument("features")
    s.add_argument("--out", default=None, help="output CSV (default stdout)")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("evaluate", parents=[common], help="RRSE, MAE and RMSE of predictions")
    s.add_argument("predictions", help="CSV id,prediction")
    s.add_argument("targets", help="CSV with id and f_measure_target")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("auto-binarize", parents=[common], help="tune Sauvola per image with a surrogate")
    s.add_argument("image")
    s.add_argument("model")
    s.add_argument("out", help="output PBM")
    s.add_argument("--budget", type=int, default=25)
    s.add_argument("--trace", default=None, help="trace CSV (default <out>_trace.csv)")
    s.add_argument("--min-window", type=int, default=DEFAULT_WINDOW_BOUNDS[0])
    s.add_argument("--max-window", type=int, default=DEFAULT_WINDOW_BOUNDS[1])
    s.add_argument("--min-k", type=float, default=DEFAULT_K_BOUNDS[0])
    s.add_argument("--max-k", type=float, default=DEFAULT_K_BOUNDS[1])
    s.set_defaults(func=cmd_auto_binarize)

    s = sub.add_parser("synth", parents=[common], help="write a synthetic degraded corpus with ground truth")
    s.add_argument("outdir")
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--height", type=int, default=96)
    s.add_argument("--width", type=int, default=128)
    s.add_argument("--window", type=int, default=None, help="also write Sauvola binarizations")
    s.add_argument("--k", type=float, default=0.2)
    s.set_defaults(func=cmd_synth)
    return p


def _showwarning(message, category, filename, lineno, file=None, line=None):
    print(f"{PROG}: warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed = getattr(args, "seed", 0)
    args.verbose = getattr(args, "verbose", False)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format=f"{PROG}: %(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    with warnings.catch_warnings():
        warnings.showwarning = _showwarning
        try:
            args.func(args)
        except InputError as exc:
            _err(f"{PROG}: error: {type(exc).__name__}: {exc}")
            return 2
        except DomainError as exc:
            _err(f"{PROG}: error: {type(exc).__name__}: {exc}")
            return 1
        except (OSError, ValueError) as exc:
            _err(f"{PROG}: error: {type(exc).__name__}: {exc}")
            return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
