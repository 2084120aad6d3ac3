"""Command-line front end: ``geolect ingest | majority | distance``."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import analysis, export, plotting
from .config import ConfigError, RunConfig, build_config, config_digest, parse_config_text
from .freqmodel import ModelError, apply_threshold, mask_cells, read_model, write_model
from .grid import GridError, read_allowlist
from .ingest import IngestSettings, run_ingest
from .lexicon import Lexicon, LexiconError, read_lexicon

logger = logging.getLogger("geolect")

EXIT_FAILURE = 1
EXIT_CONFIG = 2


class CommandError(RuntimeError):
    def __init__(self, message: str, code: int = EXIT_FAILURE):
        super().__init__(message)
        self.code = code


def slug(text: str) -> str:
    return re.sub(r"[^\w]+", "-", text, flags=re.UNICODE).strip("-").lower() or "concept"


def _load_lexicon(cfg: RunConfig) -> Lexicon:
    try:
        return read_lexicon(cfg.lexicon, accent_fold=cfg.accent_fold)
    except (OSError, LexiconError) as exc:
        raise CommandError(f"cannot load lexicon: {exc}", EXIT_CONFIG) from None


def _ingest_settings(cfg: RunConfig, lexicon: Lexicon) -> dict:
    return {
        "inputs": [str(p) for p in cfg.inputs],
        "lexicon_digest": lexicon.digest,
        "lang": cfg.lang,
        "min_prob": cfg.min_prob,
        "prob_comparison": ">=" if cfg.inclusive_prob else ">",
        "accent_fold": cfg.accent_fold,
        "grid": cfg.grid.to_string(),
    }


def cmd_ingest(cfg: RunConfig) -> dict:
    """Build and persist the frequency model plus a JSON skip report."""
    cfg.validate(need_inputs=True)
    lexicon = _load_lexicon(cfg)
    settings = IngestSettings(cfg.lang, cfg.min_prob, strict=not cfg.inclusive_prob)
    try:
        model, report = run_ingest(cfg.inputs, lexicon, cfg.grid, settings, workers=cfg.workers)
    except (OSError, UnicodeDecodeError, EOFError) as exc:
        raise CommandError(f"cannot read input: {exc}") from None

    run = _ingest_settings(cfg, lexicon)
    digest = config_digest(run)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_model(model, cfg.model_path, {
        "filter": f"lang={cfg.lang},min_prob={cfg.min_prob!r},comparison={run['prob_comparison']},"
                  f"accent_fold={str(cfg.accent_fold).lower()}",
        "config_digest": digest,
    })
    doc = report.to_dict()
    doc["config_digest"] = digest
    doc["cells_with_data"] = len(model.cells())
    doc["non_canonical"] = {"generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    report_path = cfg.out / "skip_report.json"
    report_path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    logger.info("read %d records, kept %d, matched %d -> %s",
                report.total_read, report.kept, report.matched, cfg.model_path)
    return {"model": cfg.model_path, "report": report_path}


def _load_model(cfg: RunConfig, lexicon: Lexicon) -> tuple:
    try:
        model, meta = read_model(cfg.model_path, lexicon)
    except (ModelError, GridError) as exc:
        raise CommandError(f"unusable model {cfg.model_path}: {exc}", EXIT_CONFIG) from None
    if cfg.allow_cells is not None:
        model = mask_cells(model, read_allowlist(cfg.allow_cells))
    return model, meta


def _check_concept(lexicon: Lexicon, concept: str, allow_all: bool) -> None:
    if concept in lexicon or (allow_all and concept == analysis.ALL_CONCEPTS):
        return
    valid = "\n  ".join(lexicon.concept_ids)
    raise CommandError(f"unknown concept {concept!r}; valid concepts are:\n  {valid}", EXIT_CONFIG)


def cmd_majority(cfg: RunConfig) -> dict:
    cfg.validate(need_model=True)
    lexicon = _load_lexicon(cfg)
    _check_concept(lexicon, cfg.concept, allow_all=False)
    model, model_meta = _load_model(cfg, lexicon)
    mmap = analysis.majority_map(model, cfg.concept)
    meta = {
        "lexicon_digest": lexicon.digest,
        "model_config_digest": model_meta.get("config_digest", ""),
        "config_digest": config_digest({"model": model_meta.get("config_digest", ""),
                                        "concept": cfg.concept,
                                        "allow_cells": str(cfg.allow_cells or "")}),
    }
    cfg.out.mkdir(parents=True, exist_ok=True)
    stem = cfg.out / f"majority_{slug(cfg.concept)}"
    geo = export.write_text(stem.with_suffix(".geojson"), export.dumps_majority(mmap, model.spec, meta))
    outputs = {"geojson": geo}
    if mmap.entries:
        outputs["svg"] = plotting.render_majority(
            mmap, lexicon.concept(cfg.concept).variant_ids, model.spec, stem.with_suffix(".svg"))
    return outputs


def cmd_distance(cfg: RunConfig) -> dict:
    """Threshold, build the matrix, pick the reference cell and write matrix + field(s)."""
    cfg.validate(need_model=True)
    lexicon = _load_lexicon(cfg)
    _check_concept(lexicon, cfg.concept, allow_all=True)
    model, model_meta = _load_model(cfg, lexicon)
    model = apply_threshold(model, cfg.threshold, cfg.threshold_mode)

    try:
        matrix = analysis.build_distance_matrix(model, cfg.concept, cfg.metric, cfg.threshold,
                                                workers=cfg.workers)
        ref = analysis.select_reference(matrix)
        fields = [analysis.distance_field(matrix, ref.i_max)]
        if cfg.both_references:
            fields.append(analysis.distance_field(matrix, ref.j_max))
    except analysis.DegenerateMatrixError as exc:
        raise CommandError(f"degenerate distance matrix: {exc}") from None

    meta = {
        "lexicon_digest": lexicon.digest,
        "model_config_digest": model_meta.get("config_digest", ""),
        "config_digest": config_digest({
            "model": model_meta.get("config_digest", ""),
            "concept": cfg.concept,
            "metric": cfg.metric.value,
            "threshold": cfg.threshold,
            "threshold_mode": cfg.threshold_mode,
            "allow_cells": str(cfg.allow_cells or ""),
        }),
        "threshold_mode": cfg.threshold_mode,
        "grid": model.spec.to_string(),
        "reference_tie_break": "first (row, col) in cell order",
    }
    cfg.out.mkdir(parents=True, exist_ok=True)
    stem = f"{slug(cfg.concept)}_{cfg.metric.value}_t{cfg.threshold}"
    outputs = {"matrix": export.write_text(cfg.out / f"matrix_{stem}.csv", export.dumps_matrix(matrix, meta))}
    for k, fld in enumerate(fields, start=1):
        base = cfg.out / f"field_{stem}_ref{k}"
        fmeta = dict(meta, reference_role="i_max" if k == 1 else "j_max")
        outputs[f"field{k}"] = export.write_text(base.with_suffix(".geojson"),
                                                 export.dumps_field(fld, model.spec, fmeta))
        outputs[f"svg{k}"] = plotting.render_field(fld, model.spec, base.with_suffix(".svg"))
    if len(fields) == 2:
        rho, n = analysis.compare_fields(*fields)
        same_side, same_split = analysis.median_split_agreement(*fields)
        record = {
            "reference_1": str(fields[0].reference),
            "reference_2": str(fields[1].reference),
            "d_max": ref.d_max,
            "spearman_rho": rho,
            "common_cells": n,
            "median_same_side": same_side,
            "median_same_partition": same_split,
            "config_digest": meta["config_digest"],
        }
        path = cfg.out / f"compare_{stem}.json"
        path.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
        outputs["compare"] = path
    return outputs


COMMANDS = {"ingest": cmd_ingest, "majority": cmd_majority, "distance": cmd_distance}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value run configuration file")
    common.add_argument("--lexicon", type=Path, help="lexicon TSV (default: bundled table)")
    common.add_argument("--grid", help="origin_lon,origin_lat,size,ncols,nrows")
    common.add_argument("--accent-fold", action="store_true", default=None,
                        help="strip diacritics from keywords and tokens")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--model", type=Path, help="frequency model CSV (default: OUT/model.csv)")
    common.add_argument("--workers", type=int, help="worker processes/threads")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="geolect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="build the frequency model from JSONL")
    p.add_argument("--input", nargs="+", type=Path, help="JSONL corpus file(s), optionally gzipped")
    p.add_argument("--lang", help="language code to keep (default es)")
    p.add_argument("--min-prob", type=float, help="language probability cut (default 0.6)")
    p.add_argument("--inclusive-prob", action="store_true", default=None,
                   help="keep records with probability equal to the cut")

    analysis_opts = argparse.ArgumentParser(add_help=False)
    analysis_opts.add_argument("--allow-cells", type=Path, help="file of col:row cells to keep")

    p = sub.add_parser("majority", parents=[common, analysis_opts], help="majority-variant map")
    p.add_argument("--concept", help="concept id")

    p = sub.add_parser("distance", parents=[common, analysis_opts], help="distance matrix and field")
    p.add_argument("--concept", help="concept id or 'all' (averaged)")
    p.add_argument("--metric", choices=["cosine", "jsd"])
    p.add_argument("--threshold", type=int, help="minimum tweets per cell")
    p.add_argument("--threshold-mode", choices=["per-concept", "per-cell"])
    p.add_argument("--both-references", action="store_true", default=None,
                   help="also write the field seen from the other end of the d_max pair")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    layers = []
    if args.config is not None:
        try:
            layers.append(parse_config_text(args.config.read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    layers.append(flags)
    return build_config(layers)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        outputs = COMMANDS[args.command](cfg)
    except (ConfigError, GridError) as exc:
        print(f"geolect {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CommandError as exc:
        print(f"geolect {args.command}: {exc}", file=sys.stderr)
        return exc.code
    for name, path in outputs.items():
        print(f"{name}\t{path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
