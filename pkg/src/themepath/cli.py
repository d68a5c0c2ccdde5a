"""Command-line interface: summarize, evaluate, inspect, bench.

Exit codes: 0 success, 1 internal error, 2 usage or input error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import sys
import time

import click
import numpy as np

from . import pathfinding
from .artifact import (
    RunArtifact,
    decode_log_prob,
    load_artifact,
    save_artifact,
    to_canonical_json,
    write_atomic,
)
from .config import RunConfig, load_config
from .errors import ConfigError, PipelineStageError, ThemepathError
from .evaluation import EvalReport, evaluate_corpus, render_table
from .markov import TransitionMatrix
from .pipeline import run_pipeline

USAGE_ERROR = 2
INTERNAL_ERROR = 1


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main() -> None:
    """Long-document summarization via thematic clustering and Markov path ordering."""


def _load_run_config(config_path: str | None) -> RunConfig:
    if config_path is None:
        return RunConfig()
    try:
        return load_config(config_path)
    except ConfigError as exc:
        _fail(USAGE_ERROR, str(exc))


def _apply_overrides(cfg: RunConfig, mode, k, seed, out_dir, provider) -> RunConfig:
    if mode is not None:
        cfg.mode = mode
    if k is not None:
        cfg.k = k
    if seed is not None:
        cfg.seed = seed
    if out_dir is not None:
        cfg.out_dir = out_dir
    if provider == "mock":
        cfg.embedding.kind = "deterministic-test"
        cfg.llm.kind = "mock-extractive"
    elif provider == "remote":
        cfg.embedding.kind = "remote"
        cfg.llm.kind = "remote-chat"
    try:
        cfg.__post_init__()
    except ConfigError as exc:
        _fail(USAGE_ERROR, str(exc))
    return cfg


@main.command("summarize")
@click.argument("input_path")
@click.option("--config", "config_path", default=None, help="Flat key=value config file.")
@click.option("--mode", type=click.Choice(["markov-cluster", "cluster-sum", "llm-full"]), default=None)
@click.option("--k", type=int, default=None, help="Explicit cluster count.")
@click.option("--seed", type=int, default=None)
@click.option("--out-dir", default=None, help="Run directory for artifact and summary.")
@click.option("--provider", type=click.Choice(["remote", "mock"]), default=None)
def cmd_summarize(input_path, config_path, mode, k, seed, out_dir, provider):
    """Summarize a UTF-8 text document and write the run artifact."""
    cfg = _apply_overrides(_load_run_config(config_path), mode, k, seed, out_dir, provider)
    if not os.path.isfile(input_path):
        _fail(USAGE_ERROR, f"input file not found: {input_path}")
    try:
        with open(input_path, "r", encoding="utf-8") as fh:
            document = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        _fail(USAGE_ERROR, f"cannot read {input_path}: {exc}")

    try:
        result = run_pipeline(
            document, cfg.mode, cfg, progress=lambda stage: click.echo(f"[stage] {stage}")
        )
    except PipelineStageError as exc:
        _fail(INTERNAL_ERROR, str(exc))
    except ValueError as exc:
        _fail(USAGE_ERROR, str(exc))

    os.makedirs(cfg.out_dir, exist_ok=True)
    artifact_path = os.path.join(cfg.out_dir, "artifact.json")
    save_artifact(result, artifact_path)
    write_atomic(os.path.join(cfg.out_dir, "summary.txt"), result.final_summary + "\n")
    write_atomic(
        os.path.join(cfg.out_dir, "timings.json"),
        json.dumps(result.timings, indent=2, sort_keys=True) + "\n",
    )
    click.echo(f"artifact: {artifact_path}")


def _read_manifest(manifest_path: str) -> list[tuple[str, str, str]]:
    """TSV lines: candidate_path <TAB> reference_path [<TAB> mode]."""
    rows: list[tuple[str, str, str]] = []
    base = os.path.dirname(os.path.abspath(manifest_path))
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise ConfigError(f"manifest line {lineno}: expected 2 or 3 tab-separated fields")
            candidate = os.path.join(base, parts[0])
            reference = os.path.join(base, parts[1])
            mode = parts[2] if len(parts) == 3 else "default"
            rows.append((candidate, reference, mode))
    return rows


@main.command("evaluate")
@click.argument("manifest_path")
@click.option("--config", "config_path", default=None)
@click.option("--out", "out_path", default=None, help="Report JSON path (default: stdout only).")
def cmd_evaluate(manifest_path, config_path, out_path):
    """Score candidate summaries against references per the manifest."""
    cfg = _load_run_config(config_path)
    if not os.path.isfile(manifest_path):
        _fail(USAGE_ERROR, f"manifest not found: {manifest_path}")
    try:
        entries = _read_manifest(manifest_path)
    except ConfigError as exc:
        _fail(USAGE_ERROR, str(exc))
    if not entries:
        _fail(USAGE_ERROR, "manifest is empty")

    pairs = []
    modes = []
    for candidate_path, reference_path, mode in entries:
        for path in (candidate_path, reference_path):
            if not os.path.isfile(path):
                _fail(USAGE_ERROR, f"manifest references missing file: {path}")
        with open(candidate_path, "r", encoding="utf-8") as fh:
            candidate = fh.read()
        with open(reference_path, "r", encoding="utf-8") as fh:
            reference = fh.read()
        pairs.append((candidate, reference))
        modes.append(mode)

    report = evaluate_corpus(pairs, cfg.embedding, modes)
    rendered = render_table(report)
    click.echo(rendered, nl=False)
    if out_path is not None:
        write_atomic(out_path, report_to_json(report))
        click.echo(f"report: {out_path}")


def report_to_json(report: EvalReport) -> str:
    return to_canonical_json(
        {
            "per_document": report.per_document,
            "aggregates": report.aggregates,
            "failure_counts": report.failure_counts,
        }
    )


def _artifact_matrix(art: RunArtifact) -> TransitionMatrix:
    if art.transition_matrix is None:
        _fail(USAGE_ERROR, "artifact has no transition matrix (not a markov-cluster run)")
    data = art.transition_matrix
    return TransitionMatrix(
        probs=np.asarray(data["probs"], dtype=np.float64),
        k=data["k"],
        zero_rows=frozenset(data["zero_rows"]),
    )


@main.command("inspect")
@click.argument("artifact_path")
@click.option("--what", type=click.Choice(["matrix", "path", "clusters"]), required=True)
def cmd_inspect(artifact_path, what):
    """Pretty-print one facet of a run artifact."""
    try:
        art = load_artifact(artifact_path)
    except ThemepathError as exc:
        _fail(USAGE_ERROR, str(exc))

    if what == "matrix":
        matrix = _artifact_matrix(art)
        for i, row in enumerate(matrix.probs):
            cells = "  ".join(f"{x:.6f}" for x in row)
            note = "zero row" if i in matrix.zero_rows else f"sum={row.sum():.6f}"
            click.echo(f"row {i}: [{cells}]  ({note})")
    elif what == "path":
        if art.path is None:
            _fail(USAGE_ERROR, "artifact has no path (not a markov-cluster run)")
        order = art.path["order"]
        log_prob = decode_log_prob(art.path["log_prob"])
        matrix = _artifact_matrix(art)
        arrow = " → ".join(str(c) for c in order)
        prob = 0.0 if math.isinf(log_prob) else math.exp(log_prob)
        click.echo(f"{arrow}, p = {prob:g}")
        for a, b in zip(order, order[1:]):
            click.echo(f"  {a} → {b}: {matrix.probs[a][b]:.6f}")
        click.echo(f"method: {art.path['method']}")
    else:
        if art.labels is None or art.representatives is None:
            _fail(USAGE_ERROR, "artifact has no clustering data")
        from collections import Counter

        sizes = Counter(art.labels)
        for cluster in sorted(art.representatives, key=int):
            ids = art.representatives[cluster]
            click.echo(
                f"cluster {cluster}: size={sizes[int(cluster)]} representatives={ids}"
            )


@main.command("bench")
@click.option("--max-k", type=int, default=20, show_default=True)
@click.option("--trials", type=int, default=5, show_default=True)
@click.option("--out", "out_path", default=None, help="CSV output path (default: stdout).")
@click.option(
    "--compare", is_flag=True, default=False, help="Time every available DP backend, not just the default."
)
def cmd_bench(max_k, trials, out_path, compare):
    """Median DP solve time per k on random row-stochastic matrices."""
    if max_k > pathfinding.DP_HARD_CAP:
        _fail(USAGE_ERROR, f"--max-k must be <= {pathfinding.DP_HARD_CAP}")
    if max_k < 2:
        _fail(USAGE_ERROR, "--max-k must be >= 2")
    if trials < 1:
        _fail(USAGE_ERROR, "--trials must be >= 1")

    backends = pathfinding.available_backends() if compare else [pathfinding.default_backend()]
    rows = bench_rows(max_k, trials, backends)
    buf = io.StringIO()
    writer = csv.writer(buf)
    if compare:
        writer.writerow(["k", "backend", "milliseconds"])
        writer.writerows(rows)
    else:
        writer.writerow(["k", "milliseconds"])
        writer.writerows((k, ms) for k, _, ms in rows)
    text = buf.getvalue()
    if out_path is None:
        click.echo(text, nl=False)
    else:
        write_atomic(out_path, text)
        click.echo(f"bench: {out_path}")


def random_transition_matrix(k: int, seed: int) -> TransitionMatrix:
    rng = np.random.default_rng(seed)
    probs = rng.random((k, k))
    probs /= probs.sum(axis=1, keepdims=True)
    return TransitionMatrix(probs=probs, k=k, zero_rows=frozenset())


def bench_rows(max_k: int, trials: int, backends: list[str]) -> list[tuple[int, str, float]]:
    rows = []
    for k in range(2, max_k + 1):
        for backend in backends:
            times = []
            for trial in range(trials):
                matrix = random_transition_matrix(k, seed=1000 * k + trial)
                started = time.perf_counter()
                pathfinding.solve_dp(matrix, backend=backend)
                times.append((time.perf_counter() - started) * 1000.0)
            rows.append((k, backend, round(statistics.median(times), 3)))
    return rows


if __name__ == "__main__":
    main()
