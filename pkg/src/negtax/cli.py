"""Command-line entry point: generate, classify, evaluate, stats.

Exit codes: 0 ok, 2 usage or shape error, 3 external-service failure,
4 oracle exhaustion. Errors go to stderr as one JSON object per failure.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import classifier, data, datagen, evalharness, lexnet, stats
from .config import Config, ConfigError, load_config
from .oracle import (
    HttpTransport,
    OracleClient,
    OracleError,
    OracleParams,
    RateLimiter,
    ReplayMiss,
    TranscriptStore,
)
from .taxonomy import NegationLabel, TAXONOMY_LEAVES, UnknownLabel

EXIT_USAGE = 2
EXIT_EXTERNAL = 3
EXIT_ORACLE = 4


def _fail(code: int, kind: str, message: str):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


def _dump_json(path, obj):
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _build_client(cfg: Config, temperature: float | None = None) -> OracleClient:
    store = TranscriptStore(cfg.oracle.transcript_dir) if cfg.oracle.transcript_dir else None
    transport = None
    if cfg.oracle.mode in ("live", "record"):
        transport = HttpTransport(cfg.oracle.endpoint)
    params = OracleParams(
        model=cfg.oracle.model,
        temperature=cfg.oracle.temperature if temperature is None else temperature,
    )
    return OracleClient(
        transport=transport,
        mode=cfg.oracle.mode,
        store=store,
        params=params,
        rate_limiter=RateLimiter(cfg.oracle.rate_limit),
    )


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Config file (INI-style sections).")
@click.pass_context
def main(ctx, config_path):
    """Negation taxonomy toolkit."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        _fail(EXIT_USAGE, "config", str(exc))
    ctx.obj = cfg


def _parse_types(spec: str) -> list[NegationLabel]:
    if spec == "all":
        return list(TAXONOMY_LEAVES)
    return [NegationLabel.from_string(s) for s in spec.split(",") if s.strip()]


@main.command()
@click.option("--mode", type=click.Choice(["free", "controlled"]), required=True)
@click.option("--types", default="all", help="Comma-separated labels or 'all'.")
@click.option("--topics", "topics_n", type=int, default=100)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--verify/--no-verify", default=True)
@click.pass_obj
def generate(cfg: Config, mode, types, topics_n, out_path, seed, verify):
    """Generate a taxonomy-driven synthetic dataset (JSONL + stats JSON)."""
    if topics_n < 1:
        _fail(EXIT_USAGE, "usage", "--topics must be >= 1")
    try:
        cfg.validate()
        job = datagen.GenerationJob(
            mode=datagen.Mode(mode),
            types=_parse_types(types),
            topics_n=topics_n,
            seed=cfg.seed if seed is None else seed,
        )
    except (ConfigError, datagen.DatagenError, data.DataError, UnknownLabel) as exc:
        _fail(EXIT_USAGE, "usage", str(exc))
    client = _build_client(cfg, temperature=0.7)
    try:
        instances = datagen.run_generation(
            job, client, endpoint=cfg.wikipedia_endpoint, verify=verify
        )
    except ReplayMiss as exc:
        _fail(EXIT_ORACLE, "replay_miss", str(exc))
    except OracleError as exc:
        _fail(EXIT_ORACLE, "oracle", str(exc))
    except datagen.GroundingError as exc:
        _fail(EXIT_EXTERNAL, "grounding", str(exc))
    data.write_jsonl(out_path, instances)
    try:
        ds_stats = datagen.dataset_stats(instances)
    except data.EmptyDataset as exc:
        _fail(EXIT_ORACLE, "empty", str(exc))
    _dump_json(str(out_path) + ".stats.json", ds_stats.to_json())
    click.echo(f"wrote {len(instances)} instances to {out_path}")


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Traces JSONL; report written next to it.")
@click.option("--proofs", type=click.Choice(["live", "replay"]), default="replay")
@click.option("--format", "fmt", type=click.Choice(["native", "nevir", "excluir"]),
              default="native")
@click.option("--wordnet", "wordnet_dir", type=click.Path(), default=None)
@click.pass_obj
def classify(cfg: Config, in_path, out_path, proofs, fmt, wordnet_dir):
    """Classify a dataset into negation types via the 4-step cascade."""
    if proofs == "live":
        cfg.oracle.mode = "live"
    try:
        cfg.validate()
    except ConfigError as exc:
        _fail(EXIT_USAGE, "config", str(exc))
    wn_dir = wordnet_dir or cfg.wordnet_dir
    if not wn_dir:
        _fail(EXIT_USAGE, "usage", "wordnet_dir required (--wordnet or config)")
    try:
        antonyms = lexnet.load(wn_dir)
    except lexnet.ResourceError as exc:
        _fail(EXIT_USAGE, "wordnet", str(exc))
    try:
        instances, skipped_lines = data.read_jsonl(in_path, fmt)
    except data.EmptyDataset as exc:
        _fail(EXIT_USAGE, "empty", str(exc))
    except data.DataError as exc:
        _fail(EXIT_USAGE, "data", str(exc))
    for line_no in skipped_lines:
        click.echo(f"skipped malformed line {line_no}", err=True)

    client = _build_client(cfg, temperature=0.0)
    source = classifier.OracleProofSource(client)
    try:
        report, traces = classifier.classify_dataset(instances, source, antonyms)
    except ReplayMiss as exc:
        _fail(EXIT_ORACLE, "replay_miss", str(exc))
    except OracleError as exc:
        _fail(EXIT_ORACLE, "oracle", str(exc))

    with open(out_path, "w", encoding="utf-8") as fh:
        for trace in traces:
            fh.write(json.dumps(trace.to_json(), sort_keys=True, ensure_ascii=False) + "\n")
    _dump_json(str(out_path) + ".report.json", report.to_json())
    Path(str(out_path) + ".report.md").write_text(report.to_markdown(), encoding="utf-8")
    click.echo(f"classified {len(traces)} instances ({report.skipped} skipped)")


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--scorer", "scorer_spec", default="bm25",
              help="bm25, cmd:<argv>, or http:<url>.")
@click.option("--report", "report_path", type=click.Path(), required=True)
@click.pass_obj
def evaluate(cfg: Config, in_path, scorer_spec, report_path):
    """Pairwise-accuracy evaluation of a scorer over a contrastive dataset."""
    try:
        instances, _ = data.read_jsonl(in_path)
    except data.DataError as exc:
        _fail(EXIT_USAGE, "data", str(exc))
    scorer = None
    try:
        if scorer_spec == "bm25":
            scorer = evalharness.Bm25Scorer.over_dataset(instances, cfg.eval.bm25)
        else:
            scorer = evalharness.external_scorer(
                scorer_spec, cfg.eval.batch_size, cfg.eval.timeout_s
            )
    except evalharness.BridgeProtocolError as exc:
        _fail(EXIT_EXTERNAL, "bridge", str(exc))
    except (evalharness.EvalError, OSError) as exc:
        _fail(EXIT_USAGE, "scorer", str(exc))
    try:
        report = evalharness.pairwise_accuracy(instances, scorer)
    except evalharness.BridgeProtocolError as exc:
        _fail(EXIT_EXTERNAL, "bridge", str(exc))
    finally:
        if scorer is not None:
            scorer.close()
    _dump_json(report_path, report.to_json())
    Path(str(report_path) + ".md").write_text(report.to_markdown(), encoding="utf-8")
    click.echo(f"overall pairwise accuracy: {report.overall_pairwise_acc:.4f}")


@main.command(name="stats")
@click.option("--annotations", "annotations_path", type=click.Path(exists=True), default=None)
@click.option("--groups", "groups_path", type=click.Path(exists=True), default=None,
              help="JSON object mapping group name to a list of observations.")
@click.option("--test", "test_name",
              type=click.Choice(["kappa", "anova", "tukey", "f1", "agreement"]),
              required=True)
@click.option("--weighting", type=click.Choice(["none", "linear", "quadratic"]),
              default="linear")
@click.option("--alpha", type=float, default=0.05)
@click.option("--out", "out_path", type=click.Path(), default=None)
def stats_cmd(annotations_path, groups_path, test_name, weighting, alpha, out_path):
    """Agreement metrics and significance tests."""
    result: dict = {"test": test_name}
    try:
        if test_name in ("kappa", "f1", "agreement"):
            if not annotations_path:
                _fail(EXIT_USAGE, "usage", f"--test {test_name} requires --annotations")
            tables = stats.load_annotations(annotations_path)
            per_question = {}
            for question, table in tables.items():
                if test_name == "kappa":
                    per_question[question] = stats.cohen_kappa(
                        table, stats.Weighting(weighting)
                    )
                elif test_name == "f1":
                    per_question[question] = stats.f1_binary(table.rater_a, table.rater_b)
                else:
                    per_question[question] = stats.agreement_recall(
                        table.rater_a, table.rater_b
                    )
            result["per_question"] = per_question
            if test_name == "kappa":
                result["weighting"] = weighting
        else:
            if not groups_path:
                _fail(EXIT_USAGE, "usage", f"--test {test_name} requires --groups")
            with open(groups_path, encoding="utf-8") as fh:
                groups = stats.GroupedSamples(json.load(fh))
            if test_name == "anova":
                anova = stats.one_way_anova(groups)
                result.update(
                    F=anova.F, p=anova.p,
                    df_between=anova.df_between, df_within=anova.df_within,
                    degenerate_variance=anova.degenerate_variance,
                )
            else:
                pairs = stats.tukey_hsd(groups, alpha)
                result["alpha"] = alpha
                result["pairs"] = [
                    {
                        "pair": list(p.pair),
                        "mean_diff": p.mean_diff,
                        "p_adj": p.p_adj,
                        "significant": p.significant,
                    }
                    for p in pairs
                ]
    except (stats.StatsError, json.JSONDecodeError, TypeError) as exc:
        _fail(EXIT_USAGE, "shape", str(exc))
    rendered = json.dumps(result, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(rendered + "\n", encoding="utf-8")
    click.echo(rendered)


if __name__ == "__main__":
    main()
