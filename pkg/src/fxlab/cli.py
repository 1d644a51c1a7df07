"""Command-line entry point: ``fxlab <subcommand> [--config file.yaml] --out DIR``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, config_hash, load_config, resolve_config
from .experiments import Lab, ModelFailure, run_compare, run_dm, run_kind_ablation, run_text_ablation
from .ingest import DataError, SeriesFrame
from .reporting import PLOT_KINDS, atomic_write_text, emit_plot_data, write_json, write_table

logger = logging.getLogger("fxlab")

EXIT_OK, EXIT_CONFIG, EXIT_ALL_FAILED = 0, 1, 2


class AllRowsFailed(ModelFailure):
    pass


def _config(args) -> dict:
    cfg = load_config(args.config) if args.config else resolve_config()
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    return cfg


def _frame_csv(frame: SeriesFrame, path: Path) -> None:
    lines = ["date," + ",".join(frame.names)]
    for i, d in enumerate(frame.dates):
        cells = ["" if np.isnan(frame[n][i]) else repr(float(frame[n][i])) for n in frame.names]
        lines.append(f"{d}," + ",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _summary(cfg: dict, **extra) -> dict:
    return {"config_hash": config_hash(cfg), "seed": cfg["seed"], **extra}


def _check_rows(report: dict, key: str = "models") -> None:
    blocks = report.get(key, {})
    if blocks and all(b.get("status") != "ok" for b in blocks.values()):
        raise AllRowsFailed("every model failed")


def cmd_synth(args) -> None:
    from .synth import generate

    data = generate(n_days=args.n_days, seed=args.seed)
    paths = data.write(args.out)
    print(f"wrote {paths['series']} and {paths['documents']}")


def cmd_ingest(args) -> None:
    cfg = _config(args)
    lab = Lab(cfg)
    out = Path(args.out)
    _frame_csv(lab.data.frame, out / "features.csv")
    write_json(_summary(cfg, rows=len(lab.data.frame),
                        first=str(lab.data.frame.dates[0]), last=str(lab.data.frame.dates[-1]),
                        segments={k: [int(v[0]), int(v[-1])] if v.size else []
                                  for k, v in lab.segments.items()}),
               out / "ingest.json")


def cmd_features(args) -> None:
    cfg = _config(args)
    lab = Lab(cfg)
    out = Path(args.out)
    _frame_csv(lab.data.frame, out / "features.csv")
    _frame_csv(lab.frame01, out / "features_normalized.csv")
    write_json(_summary(cfg, financial=lab.financial, text=lab.data.text), out / "features.json")


def cmd_lda(args) -> None:
    cfg = _config(args)
    lab = Lab(cfg)
    model = lab.data.topic_model
    if model is None:
        raise DataError("no documents configured; topic model unavailable")
    out = Path(args.out)
    atomic_write_text(out / "topic_model.json", json.dumps(model.to_dict(), sort_keys=True) + "\n")
    rows = [{"topic": k, "rank": i + 1, "word": w, "weight": p}
            for k in range(model.K) for i, (w, p) in enumerate(model.top_words(k, 10))]
    write_table(rows, out / "top_words.csv")
    if lab.data.coherence:
        write_table([{"K": k, "coherence": v} for k, v in sorted(lab.data.coherence.items())],
                    out / "coherence.csv")


def cmd_sentiment(args) -> None:
    cfg = _config(args)
    lab = Lab(cfg)
    cols = [c for c in ("si_news", "si_analysis", "class_news", "class_analysis")
            if c in lab.data.frame.columns]
    if not cols:
        raise DataError("no documents configured; sentiment series unavailable")
    _frame_csv(lab.data.frame.select(cols), Path(args.out) / "sentiment.csv")


def cmd_train(args) -> None:
    cfg = _config(args)
    lab = Lab(cfg)
    run = lab.run(args.model, lab.feature_set(args.features))
    if run.status != "ok":
        raise AllRowsFailed(f"{args.model} failed: {run.error}")
    rows = [{"date": d, "actual": float(a), "predicted": float(p)}
            for d, a, p in zip(lab.forecast_dates, lab.actual, run.predictions)]
    out = Path(args.out)
    write_table(rows, out / "predictions.csv")
    write_json(_summary(cfg, model=args.model, features=args.features, info=run.info),
               out / "train.json")


def _harness(fn, table_name: str):
    def cmd(args) -> None:
        cfg = _config(args)
        report = fn(cfg)
        _check_rows(report)
        out = Path(args.out)
        write_json(report, out / "report.json")
        write_table(report["table"], out / f"{table_name}.csv")
        print(f"wrote {out / 'report.json'}")
    return cmd


def cmd_plot_data(args) -> None:
    report = json.loads(Path(args.report).read_text())
    for what in args.what:
        print(emit_plot_data(report, what, args.out, args.model))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fxlab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(name: str, help_: str):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="YAML config; defaults to bundled synthetic data")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", required=True, help="output directory")
        return sp

    sp = sub.add_parser("synth", help="write a synthetic series CSV and documents JSONL")
    sp.add_argument("--out", required=True)
    sp.add_argument("--n-days", type=int, default=600)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_synth)

    with_config("ingest", "load, align and segment the input series").set_defaults(func=cmd_ingest)
    with_config("features", "write the raw and normalized feature frame").set_defaults(func=cmd_features)
    with_config("lda", "fit the topic model").set_defaults(func=cmd_lda)
    with_config("sentiment", "write daily sentiment indices").set_defaults(func=cmd_sentiment)
    sp = with_config("train", "fit one model and write its forecasts")
    sp.add_argument("--model", required=True)
    sp.add_argument("--features", choices=("financial", "text", "combined"), default="combined")
    sp.set_defaults(func=cmd_train)
    with_config("compare", "all configured models, ranked").set_defaults(
        func=_harness(run_compare, "compare"))
    with_config("ablate-text", "text / financial / combined inputs").set_defaults(
        func=_harness(run_text_ablation, "ablate_text"))
    with_config("ablate-kinds", "combinations of textual kinds").set_defaults(
        func=_harness(run_kind_ablation, "ablate_kinds"))
    with_config("dm", "pairwise Diebold-Mariano ranking").set_defaults(func=_dm_cmd)

    sp = sub.add_parser("plot-data", help="long-format CSV from a saved report")
    sp.add_argument("--report", required=True)
    sp.add_argument("--what", nargs="+", required=True, choices=PLOT_KINDS)
    sp.add_argument("--model", help="model for forecast_vs_actual")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_plot_data)
    return p


def _dm_cmd(args) -> None:
    cfg = _config(args)
    report = run_dm(cfg)
    out = Path(args.out)
    write_json(report, out / "report.json")
    write_table(report["table"], out / "dm_rank.csv")
    names = report["models"]
    write_table([{"model": a, **{b: report["statistic"][a].get(b) for b in names}} for a in names],
                out / "dm_statistic.csv", ["model", *names])
    print(f"wrote {out / 'report.json'}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALL_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
