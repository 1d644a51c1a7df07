"""Comparison, ablation and Diebold-Mariano harnesses over one prepared dataset."""

from __future__ import annotations

import logging
import math
import platform
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .baselines import (
    fit_ar,
    fit_garch11,
    fit_linear,
    fit_var,
    information_criterion,
    one_step_ar,
    one_step_var,
    predict_linear,
    rfe,
)
from .config import ConfigError, config_hash
from .eval import dm_test, improvement_rate, rank_models, regression_metrics
from .features import KINDS, TARGET, FeatureData, build_features
from .ingest import (
    DataError,
    SegmentationSpec,
    align_and_fill,
    load_documents_jsonl,
    load_series_csv,
    make_supervised_windows,
    minmax_normalize,
    segment,
    segment_by_counts,
)
from .metaheuristics import optimize, space_from_config
from .rnn import RnnSpec, train
from .textmine import load_stopwords, tokenize, topic_trend

logger = logging.getLogger(__name__)

METHOD = {
    "PSO-LSTM": "Deep Learning + Optimization",
    "PSO-GRU": "Deep Learning + Optimization",
    "CS-LSTM": "Deep Learning + Optimization",
    "WOA-LSTM": "Deep Learning + Optimization",
    "GA-LSTM": "Deep Learning + Optimization",
    "BAT-LSTM": "Deep Learning + Optimization",
    "LSTM": "Deep Learning",
    "GRU": "Deep Learning",
    "PSO-SVM": "Machine Learning + Optimization",
    "PSO-SVR": "Machine Learning + Optimization",
    "SVM": "Machine Learning",
    "SVR": "Machine Learning",
    "Linear": "Statistical Method (Multi-series)",
    "VAR": "Statistical Method (Multi-series)",
    "ECM": "Statistical Method (Multi-series)",
    "AR": "Statistical Method (Single-series)",
    "GARCH": "Statistical Method (Single-series)",
}
OPTIMIZED = {"PSO": "pso", "CS": "cs", "WOA": "woa", "GA": "ga", "BAT": "bat"}
KIND_LABELS = {"kind1": "Kind 1", "kind2": "Kind 2", "kind3": "Kind 3"}


class ModelFailure(RuntimeError):
    pass


@dataclass
class ModelRun:
    name: str
    status: str  # ok | failed | external
    predictions: np.ndarray | None = None
    error: str | None = None
    info: dict = field(default_factory=dict)


def _parse_model(name: str) -> tuple[str | None, str]:
    """``PSO-LSTM`` -> (``pso``, ``lstm``); ``LSTM`` -> (None, ``lstm``); ``VAR`` -> (None, ``var``)."""
    if "-" in name:
        opt, base = name.split("-", 1)
        if opt.upper() in OPTIMIZED and base.upper() in ("LSTM", "GRU"):
            return OPTIMIZED[opt.upper()], base.lower()
    return None, name.lower()


class Lab:
    """Loads data once, prepares features and runs models on identical splits."""

    def __init__(self, cfg: dict, data: FeatureData | None = None):
        self.cfg = cfg
        self.seed = int(cfg["seed"])
        self.data = self._load() if data is None else data
        self.segments = self._segment()
        self.frame01, self.scaler = minmax_normalize(self.data.frame, self.segments["train"])
        self._cache: dict[tuple, ModelRun] = {}
        self.financial = self._financial_columns()

    # ---- data -------------------------------------------------------------
    def _load(self) -> FeatureData:
        d = self.cfg["data"]
        if d["series"]:
            frames = [load_series_csv(p) for p in d["series"]]
            series = align_and_fill(frames, d["align_policy"])
            docs = load_documents_jsonl(d["documents"]) if d["documents"] else None
        else:
            from .synth import generate

            syn = generate(**d["synthetic"])
            series, docs = syn.series, syn.docs
        f = self.cfg["features"]
        stop = load_stopwords(d["stopwords"]) if d["stopwords"] else None
        return build_features(
            series, docs, d["close_column"], f["text"] if docs else (),
            f["decay_scale"], f["si_window"], f["lda"], stop,
        )

    def _segment(self) -> dict[str, np.ndarray]:
        s = self.cfg["segmentation"]
        n = len(self.data.frame)
        if s["mode"] == "counts":
            return segment_by_counts(n, int(s["train"]), int(s["context"]), int(s["forecast"]))
        spec = SegmentationSpec(s["train_start"], s["train_end"], int(s["context_days"]),
                                s["forecast_start"], s["forecast_end"])
        return segment(self.data.frame, spec)

    def _financial_columns(self) -> list[str]:
        cols = self.data.columns(self.cfg["features"]["financial"])
        keep = self.cfg["features"]["rfe_keep"]
        if keep and len(cols) > keep:
            tr = self.segments["train"]
            X = self.data.frame.values(cols)
            # indicator values at t-1 against the target at t
            sel = rfe(X[tr[:-1]], self.data.frame[TARGET][tr[1:]], cols, int(keep),
                      n_trees=self.cfg["features"]["rfe_trees"],
                      max_depth=self.cfg["features"]["rfe_depth"], seed=self.seed)
            cols = [c for c in cols if c in sel]
        return cols

    @property
    def forecast_rows(self) -> np.ndarray:
        return self.segments["forecast"]

    @property
    def forecast_dates(self) -> list[str]:
        return [str(d) for d in self.data.frame.dates[self.forecast_rows]]

    @property
    def actual(self) -> np.ndarray:
        return np.asarray(self.data.frame[TARGET])[self.forecast_rows]

    def feature_set(self, which: str) -> list[str]:
        if which == "financial":
            return list(self.financial)
        text = self.data.text_columns
        if which == "text":
            if not text:
                raise DataError("text features are not available (no documents)")
            return text
        if which == "combined":
            if not text:
                raise DataError("text features are not available (no documents)")
            return self.financial + [c for c in text if c not in self.financial]
        raise DataError(f"unknown feature set {which!r}")

    def kind_set(self, kinds: Sequence[str]) -> list[str]:
        text = self.data.kind_columns(kinds)
        return self.financial + [c for c in text if c not in self.financial]

    # ---- models -----------------------------------------------------------
    def run(self, name: str, columns: Sequence[str]) -> ModelRun:
        key = (name, tuple(columns))
        if key not in self._cache:
            try:
                self._cache[key] = self._run(name, list(columns))
            except Exception as exc:  # noqa: BLE001 - one failed model must not stop the table
                logger.warning("%s failed: %s", name, exc)
                self._cache[key] = ModelRun(name, "failed", error=f"{type(exc).__name__}: {exc}")
        return self._cache[key]

    def _run(self, name: str, cols: list[str]) -> ModelRun:
        algo, base = _parse_model(name)
        if base in ("lstm", "gru"):
            return self._run_rnn(name, base, algo, cols)
        if base == "var":
            return self._run_var(name, cols)
        if base == "linear":
            return self._run_linear(name, cols)
        if base in ("ar", "arima"):
            return self._run_ar(name)
        if base == "garch":
            return self._run_garch(name)
        raise ConfigError(f"unknown model {name!r}")

    def _sets(self, cols: list[str], timesteps: int):
        ss = make_supervised_windows(self.frame01, TARGET, timesteps, feature_names=cols)
        out = {}
        for seg in ("train", "context", "forecast"):
            out[seg] = ss.subset(np.isin(ss.target_rows, self.segments[seg]))
        if len(out["forecast"]) != self.forecast_rows.size:
            raise DataError("forecast rows lack enough history for the requested timesteps")
        return out

    def _rnn_spec(self, cell: str, point: dict, n_features: int, seed: int) -> RnnSpec:
        r = self.cfg["rnn"]
        return RnnSpec(
            cell=cell, input_dim=n_features, hidden_units=int(point["hidden_units"]),
            timesteps=int(point["timesteps"]), learning_rate=float(point["learning_rate"]),
            epochs=int(r["epochs"]), batch_size=int(point["batch_size"]), seed=int(seed),
            patience=int(r["patience"]), clip_norm=float(r["clip_norm"]),
        )

    def _fit_rnn(self, cell: str, point: dict, cols: list[str], seed: int):
        spec = self._rnn_spec(cell, point, len(cols), seed)
        sets = self._sets(cols, spec.timesteps)
        valid = sets["context"] if len(sets["context"]) else None
        model = train(spec, sets["train"], valid)
        return model, sets

    def _run_rnn(self, name: str, cell: str, algo: str | None, cols: list[str]) -> ModelRun:
        info: dict = {}
        if algo is None:
            point = dict(self.cfg["rnn"]["defaults"])
            model, sets = self._fit_rnn(cell, point, cols, self.seed)
        else:
            s = self.cfg["search"]
            space = space_from_config(s["space"])
            best: dict = {"fitness": math.inf}

            def objective(point: dict, seed: int) -> float:
                model, sets = self._fit_rnn(cell, point, cols, seed)
                if len(sets["context"]):
                    pred = model.predict(sets["context"].windows)
                    fit = float(np.sqrt(np.mean((pred - sets["context"].targets) ** 2)))
                else:
                    fit = float(np.sqrt(model.train_loss[model.best_epoch - 1]))
                if fit < best["fitness"]:
                    best.update(fitness=fit, model=model, sets=sets, point=point)
                return fit

            res = optimize(objective, space, algo, int(s["swarm_size"]), int(s["iterations"]),
                           seed=self.seed, options=s["options"].get(algo, {}))
            if "model" not in best:
                raise ModelFailure("every candidate failed during hyperparameter search")
            model, sets, point = best["model"], best["sets"], best["point"]
            info["search_history"] = res.history
            info["search_evaluations"] = res.n_evals
            info["validation_rmse"] = res.best_fitness
        info["hyperparameters"] = {k: point[k] for k in sorted(point)}
        info["best_epoch"] = model.best_epoch
        pred01 = model.predict(sets["forecast"].windows)
        pred = self.scaler.inverse_column(TARGET, pred01)
        return ModelRun(name, "ok", pred, info=info)

    def _run_var(self, name: str, cols: list[str]) -> ModelRun:
        b = self.cfg["baselines"]
        names = [TARGET] + [c for c in cols if c != TARGET]
        Y = self.frame01.values(names)
        tr = self.segments["train"]
        Ytr = Y[tr[0]:tr[-1] + 1]
        max_lag = int(b["var_max_lag"])
        crit = {}
        for p in range(1, max_lag + 1):
            try:
                crit[p] = information_criterion(fit_var(Ytr[max_lag - p:], p), b["var_criterion"])
            except np.linalg.LinAlgError:
                break
        if not crit:
            raise ModelFailure("VAR(1) regressor matrix is singular")
        p = min(crit, key=lambda q: (crit[q], q))
        model = fit_var(Ytr, p)
        pred01 = one_step_var(model, Y, self.forecast_rows)[:, 0]
        return ModelRun(name, "ok", self.scaler.inverse_column(TARGET, pred01),
                        info={"lag": p, "criterion": b["var_criterion"],
                              "criterion_values": {str(k): v for k, v in crit.items()}})

    def _run_linear(self, name: str, cols: list[str]) -> ModelRun:
        lags = int(self.cfg["baselines"]["linear_lags"])
        sets = self._sets(cols, lags)
        flat = lambda s: s.windows.reshape(len(s), -1)  # noqa: E731
        model = fit_linear(flat(sets["train"]), sets["train"].targets)
        pred01 = predict_linear(model, flat(sets["forecast"]))
        return ModelRun(name, "ok", self.scaler.inverse_column(TARGET, pred01),
                        info={"lags": lags, "ridge_fallback": model.ridge})

    def _run_ar(self, name: str) -> ModelRun:
        b = self.cfg["baselines"]
        y = np.asarray(self.data.frame[TARGET])
        tr = self.segments["train"]
        model = fit_ar(y[tr[0]:tr[-1] + 1], int(b["ar_p"]), int(b["ar_d"]))
        pred = one_step_ar(model, y, self.forecast_rows)
        return ModelRun(name, "ok", pred, info={"p": model.p, "d": model.d, "ma_order": 0})

    def _run_garch(self, name: str) -> ModelRun:
        y = np.asarray(self.data.frame[TARGET])
        tr = self.segments["train"]
        model = fit_garch11(y[tr[0]:tr[-1] + 1])
        pred = np.array([model.mu + model.phi * y[i - 1] for i in self.forecast_rows])
        return ModelRun(name, "ok", pred, info={
            "mu": model.mu, "phi": model.phi, "omega": model.omega,
            "alpha": model.alpha, "beta": model.beta,
        })

    # ---- report helpers -----------------------------------------------------
    def provenance(self, kind: str) -> dict:
        return {
            "harness": kind,
            "config_hash": config_hash(self.cfg),
            "seed": self.seed,
            "versions": {"fxlab": __version__, "numpy": np.__version__,
                         "python": platform.python_version()},
            "config": self.cfg,
            "segments": {k: [int(v[0]), int(v[-1])] if v.size else [] for k, v in self.segments.items()},
            "financial_features": self.financial,
            "text_features": self.data.text_columns,
            "notes": {
                "kind3": "Kind 3 is interpreted as the per-topic score series (topic{k}_P/S/C)",
                "var_lag_selection": "joint VAR over target and features on training rows",
                "arima": "ARIMA restricted to AR(p,d,0)",
            },
        }


def _metrics_entry(actual, run: ModelRun) -> dict:
    if run.status != "ok":
        return {"MAE": None, "MSE": None, "RMSE": None, "R2": None}
    return regression_metrics(actual, run.predictions)


def _model_block(run: ModelRun) -> dict:
    out = {"status": run.status, "method": METHOD.get(run.name, "")}
    if run.predictions is not None:
        out["predictions"] = [float(v) for v in run.predictions]
    if run.error:
        out["error"] = run.error
    if run.info:
        out["info"] = run.info
    return out


def _ranked_table(names: Sequence[str], metrics: dict[str, dict]) -> list[dict]:
    usable = {n: metrics[n] for n in names if metrics[n]["MAE"] is not None}
    ranks = rank_models(usable) if usable else None
    rows = []
    for n in names:
        row = {"method": METHOD.get(n, ""), "model": n, "MAE": metrics[n]["MAE"],
               "rank_MAE": None, "RMSE": metrics[n]["RMSE"], "rank_RMSE": None,
               "weighted_rank": None}
        if ranks and n in usable:
            row["rank_MAE"] = ranks.ranks[n]["MAE"]
            row["rank_RMSE"] = ranks.ranks[n]["RMSE"]
            row["weighted_rank"] = ranks.weighted_rank[n]
        rows.append(row)
    return rows


def run_compare(cfg: dict, lab: Lab | None = None, models: Sequence[str] | None = None) -> dict:
    """Every configured model on the combined feature set; ranked Table-5 style rows."""
    lab = lab or Lab(cfg)
    models = list(cfg["models"] if models is None else models)
    cols = lab.feature_set("combined") if lab.data.text_columns else lab.feature_set("financial")
    runs = {m: lab.run(m, cols) for m in models}
    actual = lab.actual
    metrics = {m: _metrics_entry(actual, r) for m, r in runs.items()}
    rows = _ranked_table(models, metrics)
    for row in rows:
        row["status"] = runs[row["model"]].status
    for ext in cfg["external_models"]:
        rows.append({"method": METHOD.get(ext, ""), "model": ext, "MAE": None, "rank_MAE": None,
                     "RMSE": None, "rank_RMSE": None, "weighted_rank": None, "status": "external"})
    report = {
        "provenance": lab.provenance("compare"),
        "feature_columns": cols,
        "dates": lab.forecast_dates,
        "actual": [float(v) for v in actual],
        "models": {m: _model_block(r) for m, r in runs.items()},
        "metrics": metrics,
        "table": rows,
        "aux": _aux_series(lab),
    }
    return report


def _aux_series(lab: Lab) -> dict:
    aux: dict = {}
    fr = lab.data.frame
    si_cols = [c for c in ("si_news", "si_analysis") if c in fr.columns]
    if si_cols:
        aux["si_series"] = {"dates": [str(d) for d in fr.dates],
                            **{c: [float(v) for v in fr[c]] for c in si_cols}}
    model = lab.data.topic_model
    if model is not None:
        docs = _documents(lab)
        if docs is not None:
            stop = load_stopwords(lab.cfg["data"]["stopwords"]) if lab.cfg["data"]["stopwords"] else None
            lda = lab.cfg["features"]["lda"]
            corpus = tokenize(docs, stop, int(lda["min_len"]), int(lda["min_doc_freq"]))
            tr = topic_trend(model, corpus, int(lab.cfg["plot"]["trend_slices"]))
            aux["topic_trend"] = {
                "slice_starts": [str(d) for d in tr.slice_starts],
                "prevalence": [[None if np.isnan(v) else float(v) for v in row] for row in tr.prevalence],
            }
        aux["topics"] = {f"topic{k}": [[w, p] for w, p in model.top_words(k, 10)] for k in range(model.K)}
        if lab.data.coherence:
            aux["coherence"] = {str(k): v for k, v in lab.data.coherence.items()}
    return aux


def _documents(lab: Lab):
    d = lab.cfg["data"]
    if d["series"]:
        return load_documents_jsonl(d["documents"]) if d["documents"] else None
    from .synth import generate

    return generate(**d["synthetic"]).docs


def run_text_ablation(cfg: dict, lab: Lab | None = None, models: Sequence[str] | None = None) -> dict:
    """Text-only, financial-only and combined inputs per model, with improvement rates."""
    lab = lab or Lab(cfg)
    models = list(cfg["text_ablation"]["models"] if models is None else models)
    sets = {}
    for which in ("text", "financial", "combined"):
        try:
            sets[which] = lab.feature_set(which)
        except DataError as exc:
            raise DataError(f"text ablation needs the {which} feature family: {exc}") from None
    if not sets["financial"]:
        raise DataError("text ablation needs the financial feature family")
    actual = lab.actual
    grid, rows, runs = {}, [], {}
    for m in models:
        grid[m] = {}
        for which, cols in sets.items():
            run = lab.run(m, cols)
            runs[f"{m}|{which}"] = _model_block(run)
            grid[m][which] = _metrics_entry(actual, run)
    for metric in ("MAE", "RMSE"):
        for m in models:
            fin, comb = grid[m]["financial"][metric], grid[m]["combined"][metric]
            rate = None
            if fin is not None and comb is not None and fin > 0:
                rate = improvement_rate(fin, comb)
            rows.append({
                "metric": metric, "model": m,
                "text": grid[m]["text"][metric],
                "financial": fin,
                "combined": comb,
                "improvement_pct": None if rate is None else 100.0 * rate,
            })
    return {
        "provenance": lab.provenance("ablate-text"),
        "feature_sets": sets,
        "dates": lab.forecast_dates,
        "actual": [float(v) for v in actual],
        "models": runs,
        "grid": grid,
        "table": rows,
    }


def _dedupe(combo: Sequence[str]) -> list[str]:
    seen: list[str] = []
    for k in combo:
        if k in seen:
            logger.warning("duplicate kind %s in combination %s ignored", k, list(combo))
        else:
            seen.append(k)
    return seen


def _combo_label(combo: Sequence[str]) -> str:
    if sorted(combo) == sorted(KINDS):
        return "Full textual data"
    return " + ".join(KIND_LABELS.get(k, k) for k in combo)


def run_kind_ablation(cfg: dict, lab: Lab | None = None) -> dict:
    """One model (PSO-LSTM by default) under each combination of textual kinds."""
    lab = lab or Lab(cfg)
    spec = cfg["kind_ablation"]
    model = spec["model"]
    combos = [_dedupe(c) for c in spec["combinations"]]
    actual = lab.actual
    labels, metrics, runs, columns = [], {}, {}, {}
    for combo in combos:
        label = _combo_label(combo)
        cols = lab.kind_set(combo)
        run = lab.run(model, cols)
        labels.append(label)
        metrics[label] = _metrics_entry(actual, run)
        runs[label] = _model_block(run)
        columns[label] = cols
    table = _ranked_table(labels, metrics)
    for row in table:
        row["combination"] = row.pop("model")
        row.pop("method")
    return {
        "provenance": lab.provenance("ablate-kinds"),
        "model": model,
        "dates": lab.forecast_dates,
        "actual": [float(v) for v in actual],
        "columns": columns,
        "models": runs,
        "table": table,
    }


def dm_matrix(errors: dict[str, np.ndarray], loss: str = "squared", horizon: int = 1,
              alpha: float | None = None) -> dict:
    """All-pairs DM statistics and a ranking by pairwise wins (ties share the mean rank).

    Model A wins against B when the statistic is negative (A has the lower
    loss), and additionally significant when ``alpha`` is set.
    """
    names = list(errors)
    if len(names) < 2:
        raise ValueError("DM ranking needs at least two models")
    lengths = {len(e) for e in errors.values()}
    if len(lengths) != 1:
        raise ValueError("prediction lengths differ between models")
    stat = {a: {} for a in names}
    pval = {a: {} for a in names}
    wins = dict.fromkeys(names, 0)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            r = dm_test(errors[a], errors[b], loss, horizon)
            stat[a][b], pval[a][b] = r.statistic, r.p_value
            stat[b][a], pval[b][a] = 0.0 - r.statistic, r.p_value
            sig = alpha is None or r.p_value < alpha
            if r.statistic < 0 and sig:
                wins[a] += 1
            elif r.statistic > 0 and sig:
                wins[b] += 1
    from scipy.stats import rankdata

    ranks = rankdata([-wins[n] for n in names], method="average")
    return {
        "models": names,
        "statistic": stat,
        "p_value": pval,
        "wins": wins,
        "rank": {n: float(r) for n, r in zip(names, ranks)},
    }


def run_dm(cfg: dict, lab: Lab | None = None, compare_report: dict | None = None) -> dict:
    """Pairwise DM tests on forecast-segment errors of the configured models."""
    d = cfg["dm"]
    if compare_report is None:
        lab = lab or Lab(cfg)
        compare_report = run_compare(cfg, lab, models=d["models"])
    actual = np.asarray(compare_report["actual"])
    errors = {}
    skipped = []
    for name in d["models"]:
        block = compare_report["models"].get(name)
        if block is None or block["status"] != "ok":
            skipped.append(name)
            continue
        errors[name] = actual - np.asarray(block["predictions"])
    if not errors:
        raise ModelFailure("every model failed")
    result = dm_matrix(errors, d["loss"], int(d["horizon"]), d["alpha"])
    return {
        "provenance": compare_report["provenance"] | {"harness": "dm"},
        "loss": d["loss"],
        "horizon": d["horizon"],
        "skipped": skipped,
        **result,
        "table": [{"model": n, "wins": result["wins"][n], "rank": result["rank"][n]}
                  for n in result["models"]],
    }

