"""Command-line interface.

Subcommands: ingest, pairs, curve, compare, scenario, report,
validate-config. Configuration comes from a JSON file (--config); a few
flags override individual settings. Failures print one JSON object to
stderr and exit 1 for validation problems, 2 for runtime failures, 64
for usage mistakes. All artifacts are written atomically and contain no
timestamps, so a rerun with the same inputs is byte-identical.
"""

from __future__ import annotations

import argparse
import glob as glob_mod
import hashlib
import json
import logging
import os
import re
import sys
from dataclasses import asdict, fields, replace
from pathlib import Path
from typing import Sequence

from . import __version__, classify, corpus as corpus_mod, harness, report, roi as roi_mod
from .errors import ConfigError, RoimlError
from .harness import BuiltinTrainer, ExternalPredictions
from .roi import APPLICABLE_COST_FIELDS, CostParameters, ECONOMICS_PROFILES

logger = logging.getLogger(__name__)

DEFAULT_PROFILE = "table5-default"
_FRACTION_IN_NAME_RE = re.compile(r"f(\d*\.?\d+)")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        raise _UsageError(message)


# --- config handling ---------------------------------------------------------


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError([f"config file not found: {path}"])
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"])
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be a JSON object"])
    return raw


def _section(raw: dict, name: str, problems: list[str]) -> dict:
    value = raw.get(name)
    if value is None:
        return {}
    if not isinstance(value, dict):
        problems.append(f"{name}: must be an object")
        return {}
    return value


def _get_number(
    section: dict, section_name: str, key: str, problems: list[str],
    default=None, required=False, integer=False, minimum=None,
):
    path = f"{section_name}.{key}" if section_name else key
    if key not in section:
        if required:
            problems.append(f"{path}: required setting is missing")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{path}: must be a number, got {value!r}")
        return default
    if integer and not isinstance(value, int):
        problems.append(f"{path}: must be an integer, got {value!r}")
        return default
    if minimum is not None and value < minimum:
        problems.append(f"{path}: must be >= {minimum}, got {value!r}")
        return default
    return value


def _get_str(
    section: dict, section_name: str, key: str, problems: list[str],
    default=None, required=False, choices=None,
):
    path = f"{section_name}.{key}" if section_name else key
    if key not in section:
        if required:
            problems.append(f"{path}: required setting is missing")
        return default
    value = section[key]
    if not isinstance(value, str):
        problems.append(f"{path}: must be a string, got {value!r}")
        return default
    if choices is not None and value not in choices:
        problems.append(
            f"{path}: must be one of {', '.join(choices)}, got {value!r}"
        )
        return default
    return value


def _resolve_economics(
    raw: dict, problems: list[str]
) -> tuple[CostParameters, tuple[str, ...], str, dict[str, CostParameters], str]:
    econ = _section(raw, "economics", problems)
    profile = _get_str(
        econ, "economics", "profile", problems,
        default=DEFAULT_PROFILE, choices=tuple(ECONOMICS_PROFILES),
    ) or DEFAULT_PROFILE
    params = ECONOMICS_PROFILES[profile]()

    def apply_overrides(base: CostParameters, overrides, path: str):
        if overrides is None:
            return base
        if not isinstance(overrides, dict):
            problems.append(f"{path}: must be an object")
            return base
        valid = {f.name for f in fields(CostParameters)}
        clean = {}
        for key, value in sorted(overrides.items()):
            if key not in valid:
                problems.append(f"{path}.{key}: unknown cost parameter")
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                problems.append(f"{path}.{key}: must be a number, got {value!r}")
                continue
            clean[key] = value
        try:
            return replace(base, **clean)
        except RoimlError as exc:
            problems.append(f"{path}: {exc}")
            return base

    params = apply_overrides(params, econ.get("overrides"), "economics.overrides")

    applicable = APPLICABLE_COST_FIELDS
    if "applicable" in econ:
        value = econ["applicable"]
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            problems.append("economics.applicable: must be a list of field names")
        else:
            try:
                params.minutes_per_sample(tuple(value))
                applicable = tuple(value)
            except RoimlError as exc:
                problems.append(f"economics.applicable: {exc}")

    n_mode = _get_str(
        econ, "economics", "n_mode", problems,
        default="per_iteration", choices=harness.N_MODES,
    ) or "per_iteration"

    scenarios: dict[str, CostParameters] = {}
    if "scenarios" in econ:
        entries = econ["scenarios"]
        if not isinstance(entries, list):
            problems.append("economics.scenarios: must be a list")
        else:
            for i, entry in enumerate(entries):
                path = f"economics.scenarios[{i}]"
                if not isinstance(entry, dict):
                    problems.append(f"{path}: must be an object")
                    continue
                name = entry.get("name")
                if not isinstance(name, str) or not name:
                    problems.append(f"{path}.name: must be a nonempty string")
                    continue
                if name in scenarios:
                    problems.append(f"{path}.name: duplicate scenario {name!r}")
                    continue
                scenarios[name] = apply_overrides(
                    params, entry.get("overrides"), f"{path}.overrides"
                )
    return params, applicable, n_mode, scenarios, profile


def _resolve_sampling(
    raw: dict, args: argparse.Namespace, problems: list[str], seed_required: bool
) -> tuple[int | None, float, list[float]]:
    sampling = _section(raw, "sampling", problems)
    seed = None
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    else:
        seed = _get_number(
            sampling, "sampling", "seed", problems,
            required=seed_required, integer=True, minimum=0,
        )
    test_fraction = _get_number(
        sampling, "sampling", "test_fraction", problems, default=0.2
    )
    fractions: list[float] = list(corpus_mod.DEFAULT_FRACTIONS)
    if getattr(args, "fractions", None):
        try:
            fractions = [float(v) for v in args.fractions.split(",") if v.strip()]
        except ValueError:
            problems.append(f"--fractions: not a comma-separated float list: {args.fractions!r}")
    elif "fractions" in sampling:
        value = sampling["fractions"]
        if (
            not isinstance(value, list)
            or not value
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        ):
            problems.append("sampling.fractions: must be a nonempty list of numbers")
        else:
            fractions = [float(v) for v in value]
    return seed, float(test_fraction), fractions


def _resolve_classifier(raw: dict, problems: list[str]) -> BuiltinTrainer | None:
    start = len(problems)
    clf = _section(raw, "classifier", problems)
    kind = _get_str(
        clf, "classifier", "kind", problems,
        default="random_forest", choices=harness.BUILTIN_KINDS,
    )
    label = _get_str(clf, "classifier", "label", problems, default="") or ""
    trees = _get_number(clf, "classifier", "trees", problems, default=100, integer=True, minimum=1)
    max_depth = None
    if clf.get("max_depth") is not None:
        max_depth = _get_number(
            clf, "classifier", "max_depth", problems, integer=True, minimum=1
        )
    min_leaf = _get_number(clf, "classifier", "min_leaf", problems, default=1, integer=True, minimum=1)
    tuning = clf.get("tuning", False)
    if not isinstance(tuning, bool):
        problems.append(f"classifier.tuning: must be true or false, got {tuning!r}")
        tuning = False
    tune_mode = _get_str(
        clf, "classifier", "tune_mode", problems, default="once", choices=harness.TUNE_MODES
    )
    min_df = _get_number(clf, "classifier", "min_df", problems, default=2, integer=True, minimum=1)
    max_vocab = _get_number(
        clf, "classifier", "max_vocab", problems, default=5000, integer=True, minimum=1
    )
    alpha = _get_number(clf, "classifier", "alpha", problems, default=1.0)
    if len(problems) > start:
        return None
    try:
        return BuiltinTrainer(
            kind=kind,
            label=label,
            vectorizer=classify.VectorizerConfig(min_df, max_vocab),
            forest=classify.ForestConfig(trees, max_depth, min_leaf, tuning),
            nb=classify.NaiveBayesConfig(alpha),
            tune_mode=tune_mode,
        )
    except RoimlError as exc:
        problems.append(f"classifier: {exc}")
        return None


def _resolve_dataset(raw: dict, problems: list[str], base_dir: Path) -> dict | None:
    ds = raw.get("dataset")
    if not isinstance(ds, dict):
        problems.append("dataset: required section is missing")
        return None
    out: dict = {}
    path = _get_str(ds, "dataset", "export_csv", problems, required=True)
    if path is not None:
        out["export_csv"] = _resolve_path(path, base_dir)
    schema = ds.get("schema")
    if not isinstance(schema, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in schema.items()
    ):
        problems.append("dataset.schema: must map logical keys to column names")
    else:
        for required in ("id", "description"):
            if required not in schema:
                problems.append(f"dataset.schema.{required}: required mapping is missing")
        out["schema"] = schema
    kind_name = _get_str(
        ds, "dataset", "kind", problems,
        default="REQUIRES", choices=("REQUIRES", "RELATES_TO"),
    )
    out["kind"] = corpus_mod.DependencyKind(kind_name or "REQUIRES")
    out["min_words"] = _get_number(
        ds, "dataset", "min_words", problems,
        default=corpus_mod.DEFAULT_MIN_WORDS, integer=True, minimum=0,
    )
    out["negatives"] = None
    if ds.get("negatives") is not None:
        out["negatives"] = _get_number(
            ds, "dataset", "negatives", problems, integer=True, minimum=1
        )
    out["source_label"] = _get_str(ds, "dataset", "source_label", problems, default="") or ""
    return out


def _resolve_path(path: str, base_dir: Path) -> Path:
    p = Path(path)
    return p if p.is_absolute() else base_dir / p


# --- artifact helpers --------------------------------------------------------


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _write_json(path: Path, obj) -> None:
    _atomic_write(path, (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8"))


def _slug(label: str) -> str:
    out = re.sub(r"[^A-Za-z0-9_-]+", "-", label).strip("-")
    return out or "curve"


def _config_digest(raw: dict, args: argparse.Namespace) -> str:
    # Only inputs that shape output bytes belong in the digest; the output
    # directory does not.
    effective = {"config": raw}
    for key in ("seed", "fractions", "external_preds"):
        value = getattr(args, key, None)
        if value is not None:
            effective[key] = value
    blob = json.dumps(effective, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _write_manifest(
    out_dir: Path, subcommand: str, raw: dict, args: argparse.Namespace,
    outputs: list[str], seed: int | None = None, extra: dict | None = None,
) -> None:
    manifest = {
        "tool": "roiml",
        "version": __version__,
        "subcommand": subcommand,
        "config_sha256": _config_digest(raw, args),
        "seed": seed,
        "outputs": sorted(outputs),
    }
    if extra:
        manifest.update(extra)
    _write_json(out_dir / "manifest.json", manifest)


def _out_dir(raw: dict, args: argparse.Namespace, problems: list[str]) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    configured = raw.get("output_dir")
    if configured is not None and not isinstance(configured, str):
        problems.append("output_dir: must be a string")
        return Path("out")
    return Path(configured) if configured else Path("out")


def _read_bytes(path: Path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


# --- subcommands --------------------------------------------------------------


def _cmd_ingest(args: argparse.Namespace) -> int:
    raw = _load_config_file(args.config)
    problems: list[str] = []
    base_dir = Path(args.config).resolve().parent
    ds = _resolve_dataset(raw, problems, base_dir)
    out_dir = _out_dir(raw, args, problems)
    if problems:
        raise ConfigError(problems)
    assert ds is not None
    rset, stats = corpus_mod.parse_issue_export_with_stats(
        _read_bytes(ds["export_csv"]), ds["schema"], ds["source_label"]
    )
    records = {
        "source_label": rset.source_label,
        "rows": stats.rows,
        "skipped_empty_description": stats.skipped_empty_description,
        "records": [
            {"id": rec.id, "text": rec.text, "links": [list(l) for l in rec.links]}
            for rec in rset
        ],
    }
    _write_json(out_dir / "records.json", records)
    _write_manifest(out_dir, "ingest", raw, args, ["records.json"])
    print(f"records={len(rset)}")
    print(f"skipped_empty_description={stats.skipped_empty_description}")
    print(f"wrote {out_dir / 'records.json'}")
    return 0


def _cmd_pairs(args: argparse.Namespace) -> int:
    raw = _load_config_file(args.config)
    problems: list[str] = []
    base_dir = Path(args.config).resolve().parent
    ds = _resolve_dataset(raw, problems, base_dir)
    seed, test_fraction, fractions = _resolve_sampling(raw, args, problems, seed_required=True)
    out_dir = _out_dir(raw, args, problems)
    if problems:
        raise ConfigError(problems)
    assert ds is not None and seed is not None

    rset = corpus_mod.parse_issue_export(
        _read_bytes(ds["export_csv"]), ds["schema"], ds["source_label"]
    )
    rset = corpus_mod.filter_short(rset, ds["min_words"])
    positives = corpus_mod.extract_positive_pairs(rset, ds["kind"])
    if not positives:
        raise ConfigError(["dataset: no positive pairs could be extracted"])
    neg_count = ds["negatives"] if ds["negatives"] is not None else len(positives)
    negatives = corpus_mod.generate_negative_pairs(rset, positives, neg_count, seed)
    corpus = corpus_mod.build_corpus(positives, negatives, seed)
    pair_ids = corpus_mod.default_pair_ids(len(corpus))
    plan = corpus_mod.split(corpus, seed, test_fraction)
    schedule = corpus_mod.fraction_schedule(plan, fractions)

    outputs = ["corpus.csv", "split.json", "test.csv"]
    _atomic_write(out_dir / "corpus.csv", corpus_mod.write_corpus_csv(corpus, pair_ids))
    test_idx = list(plan.test_set)
    _atomic_write(
        out_dir / "test.csv",
        corpus_mod.write_pairs_csv(
            [corpus.pairs[i] for i in test_idx], [pair_ids[i] for i in test_idx]
        ),
    )
    for frac, subset in zip(fractions, schedule):
        name = f"train_f{frac:g}.csv"
        _atomic_write(
            out_dir / name,
            corpus_mod.write_pairs_csv(
                [corpus.pairs[i] for i in subset], [pair_ids[i] for i in subset]
            ),
        )
        outputs.append(name)
    _write_json(
        out_dir / "split.json",
        {
            "seed": plan.seed,
            "test_fraction": plan.test_fraction,
            "corpus_size": plan.corpus_size,
            "test_set": test_idx,
            "train_pool_positives": list(plan.train_pool_positives),
            "train_pool_negatives": list(plan.train_pool_negatives),
            "fractions": [float(f) for f in fractions],
            "schedule_sizes": [len(s) for s in schedule],
        },
    )
    _write_manifest(out_dir, "pairs", raw, args, outputs, seed=seed)
    print(f"positives={corpus.positives_count}")
    print(f"negatives={corpus.negatives_count}")
    print(f"corpus_pairs={len(corpus)}")
    print(f"test_pairs={len(test_idx)}")
    print(f"wrote {out_dir / 'corpus.csv'}")
    return 0


def _load_external(paths: list[str], label: str) -> ExternalPredictions:
    by_fraction: dict[float, classify.PredictionSet] = {}
    for path in paths:
        match = _FRACTION_IN_NAME_RE.search(Path(path).name)
        if not match:
            raise ConfigError(
                [f"--external-preds: cannot find an f<fraction> tag in {Path(path).name!r}"]
            )
        fraction = float(match.group(1))
        if fraction in by_fraction:
            raise ConfigError(
                [f"--external-preds: fraction {fraction:g} appears more than once"]
            )
        by_fraction[fraction] = classify.load_external_predictions(_read_bytes(Path(path)))
    return ExternalPredictions(label or "external", by_fraction)


def _expand_external_arg(arg: str) -> list[str]:
    p = Path(arg)
    if p.is_dir():
        return sorted(str(f) for f in p.glob("*.csv"))
    matches = sorted(glob_mod.glob(arg))
    if not matches:
        raise ConfigError([f"--external-preds: no files match {arg!r}"])
    return matches


def _cmd_curve(args: argparse.Namespace) -> int:
    raw = _load_config_file(args.config)
    problems: list[str] = []
    base_dir = Path(args.config).resolve().parent
    corpus_path = _get_str(raw, "", "corpus_csv", problems, required=True)
    seed, test_fraction, fractions = _resolve_sampling(raw, args, problems, seed_required=True)
    params, applicable, n_mode, _, _ = _resolve_economics(raw, problems)
    trainer: BuiltinTrainer | ExternalPredictions | None = None
    if args.external_preds:
        label = _get_str(_section(raw, "classifier", problems), "classifier", "label", problems, default="")
        try:
            trainer = _load_external(_expand_external_arg(args.external_preds), label or "external")
        except ConfigError as exc:
            problems.extend(exc.problems)
    else:
        trainer = _resolve_classifier(raw, problems)
    out_dir = _out_dir(raw, args, problems)
    if problems:
        raise ConfigError(problems)
    assert corpus_path is not None and seed is not None and trainer is not None

    pair_ids, corpus = corpus_mod.read_corpus_csv(_read_bytes(_resolve_path(corpus_path, base_dir)))
    plan = corpus_mod.split(corpus, seed, test_fraction)
    curve = harness.run_curve(
        corpus, plan, fractions, trainer, params,
        pair_ids=pair_ids, n_mode=n_mode, applicable=applicable,
    )
    slug = _slug(curve.technique_label)
    curve_name = f"curve_{slug}.csv"
    decisions_name = f"decisions_{slug}.json"
    meta_name = f"run_meta_{slug}.json"
    _atomic_write(out_dir / curve_name, report.emit_curve_csv(curve))
    _write_json(out_dir / decisions_name, harness.summarize(curve).to_dict())
    _write_json(
        out_dir / meta_name,
        {
            "technique": curve.technique_label,
            "seed": curve.seed,
            "points": len(curve.points),
            "metadata": _jsonable(curve.metadata),
            "economics": asdict(curve.parameters),
        },
    )
    _write_manifest(
        out_dir, "curve", raw, args, [curve_name, decisions_name, meta_name], seed=seed
    )
    best = harness.max_roi_point(curve)
    print(f"points={len(curve.points)}")
    print(f"max_roi={report.format_number(best.econ.roi)} at fraction={best.fraction:g}")
    print(f"wrote {out_dir / curve_name}")
    return 0


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _labeled_curve_path(arg: str) -> tuple[str, Path]:
    if "=" in arg:
        label, _, path = arg.partition("=")
        if label:
            return label, Path(path)
    return Path(arg).stem, Path(arg)


def _cmd_compare(args: argparse.Namespace) -> int:
    raw = _load_config_file(args.config)
    problems: list[str] = []
    params, applicable, _, _, _ = _resolve_economics(raw, problems)
    out_dir = _out_dir(raw, args, problems)
    if problems:
        raise ConfigError(problems)
    (label_a, path_a), (label_b, path_b) = (
        _labeled_curve_path(args.curves[0]),
        _labeled_curve_path(args.curves[1]),
    )
    curve_a = report.curve_from_rows(
        label_a, report.parse_curve_csv(_read_bytes(path_a)), params, applicable
    )
    curve_b = report.curve_from_rows(
        label_b, report.parse_curve_csv(_read_bytes(path_b)), params, applicable
    )
    crossings = {
        "a": label_a,
        "b": label_b,
        "f1": harness.crossover(curve_a, curve_b, "f1"),
        "roi": harness.crossover(curve_a, curve_b, "roi"),
    }
    _write_json(out_dir / "crossovers.json", crossings)
    svg_f1 = report.render_chart(report.metric_chart([curve_a, curve_b], "f1"))
    svg_roi = report.render_chart(report.metric_chart([curve_a, curve_b], "roi"))
    _atomic_write(out_dir / "overlay_f1.svg", svg_f1.encode("utf-8"))
    _atomic_write(out_dir / "overlay_roi.svg", svg_roi.encode("utf-8"))
    _write_manifest(
        out_dir, "compare", raw, args,
        ["crossovers.json", "overlay_f1.svg", "overlay_roi.svg"],
    )
    print(f"f1_crossovers={','.join(f'{f:g}' for f in crossings['f1']) or 'none'}")
    print(f"roi_crossovers={','.join(f'{f:g}' for f in crossings['roi']) or 'none'}")
    print(f"wrote {out_dir / 'crossovers.json'}")
    return 0


def _cmd_scenario(args: argparse.Namespace) -> int:
    raw = _load_config_file(args.config)
    problems: list[str] = []
    params, applicable, _, scenarios, _ = _resolve_economics(raw, problems)
    out_dir = _out_dir(raw, args, problems)
    if not scenarios:
        problems.append("economics.scenarios: at least one scenario is required")
    if problems:
        raise ConfigError(problems)
    label, path = _labeled_curve_path(args.curve)
    curve = report.curve_from_rows(
        label, report.parse_curve_csv(_read_bytes(path)), params, applicable
    )
    results = harness.scenario_analysis(curve, scenarios)
    _write_json(
        out_dir / "scenarios.json",
        {name: summary.to_dict() for name, summary in results.items()},
    )
    _write_manifest(out_dir, "scenario", raw, args, ["scenarios.json"])
    for name, summary in results.items():
        print(
            f"{name}: max_roi={report.format_number(summary.max_roi)} "
            f"at fraction={summary.max_roi_fraction:g}"
        )
    print(f"wrote {out_dir / 'scenarios.json'}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    raw = _load_config_file(args.config)
    problems: list[str] = []
    params, applicable, _, scenarios, _ = _resolve_economics(raw, problems)
    out_dir = _out_dir(raw, args, problems)
    if problems:
        raise ConfigError(problems)
    curves = []
    for arg in args.curves:
        label, path = _labeled_curve_path(arg)
        curves.append(
            report.curve_from_rows(
                label, report.parse_curve_csv(_read_bytes(path)), params, applicable
            )
        )
    if len(curves) == 2:
        summaries = [
            harness.summarize(curves[0], curves[1]),
            harness.summarize(curves[1], curves[0]),
        ]
    else:
        summaries = [harness.summarize(c) for c in curves]

    outputs = ["summary.md"]
    artifacts: dict[str, str] = {}
    svg_f1 = report.render_chart(report.metric_chart(curves, "f1"))
    svg_roi = report.render_chart(report.metric_chart(curves, "roi"))
    _atomic_write(out_dir / "f1_by_fraction.svg", svg_f1.encode("utf-8"))
    _atomic_write(out_dir / "roi_by_fraction.svg", svg_roi.encode("utf-8"))
    outputs += ["f1_by_fraction.svg", "roi_by_fraction.svg"]
    artifacts["F1 by training fraction"] = "f1_by_fraction.svg"
    artifacts["ROI by training fraction"] = "roi_by_fraction.svg"
    for curve in curves:
        name = f"bi_criterion_{_slug(curve.technique_label)}.svg"
        _atomic_write(
            out_dir / name,
            report.render_chart(report.bi_criterion_chart(curve)).encode("utf-8"),
        )
        outputs.append(name)
        artifacts[f"{curve.technique_label}: accuracy vs return"] = name

    scenario_summaries = None
    if scenarios:
        best = max(curves, key=lambda c: harness.max_roi_point(c).econ.roi)
        scenario_summaries = harness.scenario_analysis(best, scenarios)
    summary_md = report.emit_summary(curves, summaries, scenario_summaries, artifacts)
    _atomic_write(out_dir / "summary.md", summary_md.encode("utf-8"))
    _write_manifest(out_dir, "report", raw, args, outputs)
    print(f"curves={len(curves)}")
    print(f"wrote {out_dir / 'summary.md'}")
    return 0


def _cmd_validate_config(args: argparse.Namespace) -> int:
    raw = _load_config_file(args.config)
    problems: list[str] = []
    params, applicable, n_mode, scenarios, profile = _resolve_economics(raw, problems)
    seed, test_fraction, fractions = _resolve_sampling(raw, args, problems, seed_required=False)
    if "classifier" in raw:
        _resolve_classifier(raw, problems)
    if "dataset" in raw:
        _resolve_dataset(raw, problems, Path(args.config).resolve().parent)
    if problems:
        raise ConfigError(problems)
    print(f"profile={profile}")
    for f in fields(CostParameters):
        print(f"{f.name}={getattr(params, f.name):g}")
    print(f"applicable={','.join(applicable)}")
    print(f"n_mode={n_mode}")
    if seed is not None:
        print(f"seed={seed}")
    print(f"test_fraction={test_fraction:g}")
    print(f"fractions={','.join(f'{f:g}' for f in fractions)}")
    if scenarios:
        print(f"scenarios={','.join(scenarios)}")
    print("ok")
    return 0


# --- entry point ---------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="roiml",
        description="Evaluate text-pair classifiers by return on investment.",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p: _Parser, seed_flags: bool = True) -> None:
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        if seed_flags:
            p.add_argument("--seed", type=int, help="overrides sampling.seed")
            p.add_argument(
                "--fractions", help="comma-separated training fractions, overrides config"
            )

    p = sub.add_parser("ingest", help="parse a tracker export into cleaned records")
    common(p, seed_flags=False)

    p = sub.add_parser("pairs", help="build the balanced pair corpus and split artifacts")
    common(p)

    p = sub.add_parser("curve", help="run one technique across the fraction schedule")
    common(p)
    p.add_argument(
        "--external-preds",
        help="directory or glob of prediction CSVs named with f<fraction> tags",
    )

    p = sub.add_parser("compare", help="crossovers and overlay charts for two curve CSVs")
    common(p, seed_flags=False)
    p.add_argument("curves", nargs=2, metavar="CURVE", help="curve CSV path or LABEL=path")

    p = sub.add_parser("scenario", help="re-derive decisions under alternative economics")
    common(p, seed_flags=False)
    p.add_argument("curve", metavar="CURVE", help="curve CSV path or LABEL=path")

    p = sub.add_parser("report", help="summary markdown and charts for curve CSVs")
    common(p, seed_flags=False)
    p.add_argument("curves", nargs="+", metavar="CURVE", help="curve CSV paths or LABEL=path")

    p = sub.add_parser("validate-config", help="check a config and echo resolved settings")
    common(p, seed_flags=True)

    return parser


_HANDLERS = {
    "ingest": _cmd_ingest,
    "pairs": _cmd_pairs,
    "curve": _cmd_curve,
    "compare": _cmd_compare,
    "scenario": _cmd_scenario,
    "report": _cmd_report,
    "validate-config": _cmd_validate_config,
}


def _emit_error(kind: str, message: str, exit_code: int, problems: list[str] | None = None) -> None:
    payload: dict = {"error": {"type": kind, "message": message, "exit_code": exit_code}}
    if problems:
        payload["error"]["problems"] = problems
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _setup_logging() -> None:
    level_name = os.environ.get("ROIML_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise _UsageError("a subcommand is required (see roiml --help)")
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        _emit_error("usage", str(exc), 64)
        return 64
    except ConfigError as exc:
        _emit_error("ConfigError", str(exc), 1, exc.problems)
        return 1
    except RoimlError as exc:
        _emit_error(type(exc).__name__, str(exc), 1)
        return 1
    except OSError as exc:
        _emit_error(type(exc).__name__, str(exc), 2)
        return 2
    except Exception as exc:  # keep stderr machine-readable even for bugs
        _emit_error(type(exc).__name__, str(exc), 2)
        return 2


def main_entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    main_entry()
