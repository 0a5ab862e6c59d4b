"""Command-line entry point wiring all pipeline stages.

Subcommands mirror the stages so each is independently runnable:

  library build   generate premise explanations level-by-level
  informalize     one explanation per proof step (writes <stem>.steps.json)
  tree            dependency-tree dumps (text + DOT)
  translate       full pipeline: trace -> natural-language proof
  eval            tally / score / mcnemar reports over judgment files

Exit codes are stable for CI triage: 1 configuration error, 2 backend
error, 3 validation error.
"""

from __future__ import annotations

import functools
import json
import pathlib
import sys

import click

from . import backend as backend_mod
from .backend import (
    Backend,
    BackendConfig,
    HttpBackend,
    MockBackend,
    RecordingBackend,
    ReplayBackend,
    request_to_text,
)
from .errors import (
    BackendError,
    CatalogError,
    ConfigError,
    CycleError,
    DegenerateTable,
    EmptyConfig,
    EmptyCriteria,
    MissingExplanation,
    MissingSlot,
    ParseError,
    PipelineError,
    PromptBudgetError,
    ReplayMiss,
    StructureError,
    ValidationError,
)
from .evaluation import (
    discordant_counts,
    format_score,
    load_criterion_judgments,
    load_paired_outcomes,
    load_step_judgments,
    mcnemar,
    score_proof,
    tally,
)
from .informalize import (
    build_step_request,
    informalize_statement,
    informalize_trace,
    load_fewshot_pool,
    load_statement_fewshots,
    assemble_statement_prompt,
    statement_premises,
)
from .premises import generate_explanations, load_library, load_modules, save_library
from .summarize import SubProof, summarize_tree
from .templates import TemplateCatalog
from .tree import attach_explanations, build_tree, tree_to_dot, tree_to_text
from .trace import load_trace

EXIT_CONFIG = 1
EXIT_BACKEND = 2
EXIT_VALIDATION = 3

_CONFIG_ERRORS = (ConfigError,)
_BACKEND_ERRORS = (BackendError, ReplayMiss)
_VALIDATION_ERRORS = (
    ParseError,
    ValidationError,
    CycleError,
    CatalogError,
    StructureError,
    MissingSlot,
    MissingExplanation,
    PromptBudgetError,
    EmptyConfig,
    EmptyCriteria,
    DegenerateTable,
)


def _fail(code: int, error: Exception) -> None:
    click.echo(f"error: {error}", err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _CONFIG_ERRORS as exc:
            _fail(EXIT_CONFIG, exc)
        except _BACKEND_ERRORS as exc:
            _fail(EXIT_BACKEND, exc)
        except _VALIDATION_ERRORS as exc:
            _fail(EXIT_VALIDATION, exc)
        except PipelineError as exc:
            _fail(EXIT_VALIDATION, exc)

    return wrapper


def _existing(path: str | None, what: str) -> pathlib.Path | None:
    if path is None:
        return None
    p = pathlib.Path(path)
    if not p.exists():
        raise ConfigError(f"{what} path does not exist: {p}")
    return p


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    p = _existing(path, "config")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}:{exc.lineno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ConfigError(f"{p}: config file must hold a JSON object")
    return doc


def _resolve(cli_value, config: dict, key: str, default=None):
    if cli_value is not None:
        return cli_value
    return config.get(key, default)


def _build_backend(
    *,
    backend_kind: str,
    endpoint: str,
    model: str,
    api_key_env: str,
    record: str | None,
    replay: str | None,
    max_retries: int,
    timeout: float,
) -> Backend:
    if replay is not None:
        replay_path = _existing(replay, "replay session")
        return ReplayBackend(replay_path)
    if backend_kind == "echo":
        inner: Backend = MockBackend(echo=True)
    elif backend_kind == "http":
        inner = HttpBackend(
            BackendConfig(
                endpoint_url=endpoint,
                api_key_env=api_key_env,
                model=model,
                max_retries=max_retries,
                timeout=timeout,
            )
        )
    else:
        raise ConfigError(f"unknown backend '{backend_kind}' (expected http or echo)")
    if record is not None:
        return RecordingBackend(inner, pathlib.Path(record))
    return inner


_backend_options = [
    click.option("--backend", "backend_kind", default=None, help="http or echo (deterministic mock)"),
    click.option("--endpoint", default=None, help="chat-completions endpoint URL"),
    click.option("--model", default=None, help="model identifier"),
    click.option("--api-key-env", default=None, help="environment variable holding the API key"),
    click.option("--record", default=None, help="append (request, response) pairs to this session file"),
    click.option("--replay", default=None, help="serve responses from this session file; no network"),
    click.option("--max-retries", default=None, type=int),
    click.option("--timeout", default=None, type=float),
]


def backend_options(fn):
    for option in reversed(_backend_options):
        fn = option(fn)
    return fn


def _backend_from_opts(cfg: dict, **opts) -> Backend:
    return _build_backend(
        backend_kind=_resolve(opts.get("backend_kind"), cfg, "backend", "http"),
        endpoint=_resolve(
            opts.get("endpoint"), cfg, "endpoint", "https://api.openai.com/v1/chat/completions"
        ),
        model=_resolve(opts.get("model"), cfg, "model", backend_mod.DEFAULT_MODEL),
        api_key_env=_resolve(opts.get("api_key_env"), cfg, "api_key_env", backend_mod.DEFAULT_API_KEY_ENV),
        record=_resolve(opts.get("record"), cfg, "record"),
        replay=_resolve(opts.get("replay"), cfg, "replay"),
        max_retries=_resolve(opts.get("max_retries"), cfg, "max_retries", 2),
        timeout=_resolve(opts.get("timeout"), cfg, "timeout", 60.0),
    )


@click.group()
@click.option("--config", "config_path", default=None, help="JSON file mirroring the flags")
@click.pass_context
def cli(ctx, config_path):
    """Translate formal proof traces into natural-language proofs."""
    ctx.obj = {"config_path": config_path}


def _ctx_config(ctx) -> dict:
    return _load_config_file(ctx.obj.get("config_path"))


# ---------------------------------------------------------------------------
# library


@cli.group()
def library():
    """Premise library commands."""


@library.command("build")
@click.option("--records", "records_path", required=True, help="input records (JSON-lines)")
@click.option("--modules", "modules_path", required=True, help="module import map (JSON)")
@click.option("--library", "library_path", required=True, help="output library file (JSON-lines)")
@click.option("--seed", default=0, type=int, show_default=True, help="few-shot sampling seed")
@backend_options
@click.pass_context
@handle_errors
def library_build(ctx, records_path, modules_path, library_path, seed, **opts):
    """Generate explanations for every record, lowest module level first."""
    cfg = _ctx_config(ctx)
    modules = load_modules(_existing(modules_path, "modules"))
    lib = load_library(_existing(records_path, "records"), modules)
    backend = _backend_from_opts(cfg, **opts)
    model = _resolve(opts.get("model"), cfg, "model", backend_mod.DEFAULT_MODEL)
    built = generate_explanations(lib, backend, seed, model=model)
    save_library(built, library_path)
    click.echo(f"wrote {library_path} ({len(built.records)} records)")


# ---------------------------------------------------------------------------
# informalize / tree / translate


def _load_stores(cfg, library_path, catalog_path, fewshots_path):
    library_file = _resolve(library_path, cfg, "library")
    catalog_file = _resolve(catalog_path, cfg, "catalog")
    fewshots_file = _resolve(fewshots_path, cfg, "fewshots")
    library = load_library(_existing(library_file, "library")) if library_file else None
    if library is None:
        raise ConfigError("a premise library path is required (--library)")
    catalog = (
        TemplateCatalog.load(_existing(catalog_file, "catalog"))
        if catalog_file
        else TemplateCatalog.default()
    )
    pool = load_fewshot_pool(_existing(fewshots_file, "fewshots") if fewshots_file else None)
    return library, catalog, pool


def _write_steps_json(out_dir: pathlib.Path, stem: str, explanations) -> pathlib.Path:
    payload = {
        "steps": [
            {
                "step_id": expl.step_id,
                "text": expl.text,
                "template_id": expl.template_id,
                "flags": list(expl.flags),
            }
            for expl in explanations.values()
        ]
    }
    path = out_dir / f"{stem}.steps.json"
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


@cli.command()
@click.option("--trace", "trace_path", required=True)
@click.option("--library", "library_path", default=None)
@click.option("--catalog", "catalog_path", default=None)
@click.option("--fewshots", "fewshots_path", default=None)
@click.option("--out", "out_dir", default=".", show_default=True)
@click.option("--informalize-temperature", default=None, type=float)
@click.option("--jobs", default=1, type=int, show_default=True)
@click.option("--dry-run", is_flag=True, help="assemble and write prompts; no backend calls")
@backend_options
@click.pass_context
@handle_errors
def informalize(ctx, trace_path, library_path, catalog_path, fewshots_path, out_dir,
                informalize_temperature, jobs, dry_run, **opts):
    """Generate one explanation per proof step."""
    cfg = _ctx_config(ctx)
    trace = load_trace(_existing(trace_path, "trace"))
    library, catalog, pool = _load_stores(cfg, library_path, catalog_path, fewshots_path)
    model = _resolve(opts.get("model"), cfg, "model", backend_mod.DEFAULT_MODEL)
    temperature = _resolve(informalize_temperature, cfg, "informalize_temperature",
                           backend_mod.INFORMALIZE_TEMPERATURE)
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = pathlib.Path(trace_path).stem

    if dry_run:
        prompt_dir = out / "prompts"
        prompt_dir.mkdir(exist_ok=True)
        for step in trace.steps:
            request, _ = build_step_request(
                step, trace, library, catalog, pool, model=model, temperature=temperature
            )
            (prompt_dir / f"{stem}.{step.step_id}.prompt.txt").write_text(
                request_to_text(request), encoding="utf-8"
            )
        click.echo(f"wrote {len(trace.steps)} prompts under {prompt_dir}")
        return

    backend = _backend_from_opts(cfg, **opts)
    explanations = informalize_trace(
        trace, library, catalog, pool, backend,
        model=model, temperature=temperature, max_workers=jobs,
    )
    path = _write_steps_json(out, stem, explanations)
    click.echo(f"wrote {path}")


@cli.command()
@click.option("--trace", "trace_path", required=True)
@click.option("--out", "out_dir", default=".", show_default=True)
@handle_errors
def tree(trace_path, out_dir):
    """Emit the dependency tree as indented text and DOT."""
    trace = load_trace(_existing(trace_path, "trace"))
    built = build_tree(trace)
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = pathlib.Path(trace_path).stem
    (out / f"{stem}.tree.txt").write_text(tree_to_text(built), encoding="utf-8")
    (out / f"{stem}.tree.dot").write_text(tree_to_dot(built), encoding="utf-8")
    click.echo(f"wrote {out / (stem + '.tree.txt')} and {out / (stem + '.tree.dot')}")


@cli.command()
@click.option("--trace", "trace_paths", required=True, multiple=True,
              help="trace file; repeat to translate several proofs in one run")
@click.option("--library", "library_path", default=None)
@click.option("--catalog", "catalog_path", default=None)
@click.option("--fewshots", "fewshots_path", default=None)
@click.option("--statement-fewshots", "statement_fewshots_path", default=None)
@click.option("--mode", default="recursive", type=click.Choice(["recursive", "flat"]), show_default=True)
@click.option("--out", "out_dir", default=".", show_default=True)
@click.option("--informalize-temperature", default=None, type=float)
@click.option("--summarize-temperature", default=None, type=float)
@click.option("--max-child-chars", default=None, type=int)
@click.option("--emit-subproofs", "subproof_dir", default=None)
@click.option("--emit-tree", is_flag=True)
@click.option("--jobs", default=1, type=int, show_default=True)
@click.option("--dry-run", is_flag=True, help="deterministic stages + prompts only; no backend calls")
@backend_options
@click.pass_context
@handle_errors
def translate(ctx, trace_paths, library_path, catalog_path, fewshots_path, statement_fewshots_path,
              mode, out_dir, informalize_temperature, summarize_temperature, max_child_chars,
              subproof_dir, emit_tree, jobs, dry_run, **opts):
    """Full pipeline: informalize, build tree, summarize into one proof."""
    cfg = _ctx_config(ctx)
    traces = [(path, load_trace(_existing(path, "trace"))) for path in trace_paths]
    library, catalog, pool = _load_stores(cfg, library_path, catalog_path, fewshots_path)
    stmt_fewshots_file = _resolve(statement_fewshots_path, cfg, "statement_fewshots")
    stmt_fewshots = load_statement_fewshots(
        _existing(stmt_fewshots_file, "statement fewshots") if stmt_fewshots_file else None
    )
    model = _resolve(opts.get("model"), cfg, "model", backend_mod.DEFAULT_MODEL)
    inf_temp = _resolve(informalize_temperature, cfg, "informalize_temperature",
                        backend_mod.INFORMALIZE_TEMPERATURE)
    sum_temp = _resolve(summarize_temperature, cfg, "summarize_temperature",
                        backend_mod.SUMMARIZE_TEMPERATURE)
    budget = _resolve(max_child_chars, cfg, "max_child_chars", 6000)

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    backend = None if dry_run else _backend_from_opts(cfg, **opts)

    for trace_path, trace in traces:
        stem = pathlib.Path(trace_path).stem
        proof_tree = build_tree(trace)
        if emit_tree or dry_run:
            (out / f"{stem}.tree.txt").write_text(tree_to_text(proof_tree), encoding="utf-8")
            (out / f"{stem}.tree.dot").write_text(tree_to_dot(proof_tree), encoding="utf-8")

        stmt_premises = statement_premises(trace.theorem_statement, library)

        if dry_run:
            prompt_dir = out / "prompts"
            prompt_dir.mkdir(exist_ok=True)
            for step in trace.steps:
                request, _ = build_step_request(
                    step, trace, library, catalog, pool, model=model, temperature=inf_temp
                )
                (prompt_dir / f"{stem}.{step.step_id}.prompt.txt").write_text(
                    request_to_text(request), encoding="utf-8"
                )
            statement_request = assemble_statement_prompt(
                trace.theorem_statement, stmt_premises, stmt_fewshots,
                model=model, temperature=inf_temp,
            )
            (prompt_dir / f"{stem}.statement.prompt.txt").write_text(
                request_to_text(statement_request), encoding="utf-8"
            )
            click.echo(f"dry run: wrote prompts under {prompt_dir}")
            continue

        explanations = informalize_trace(
            trace, library, catalog, pool, backend,
            model=model, temperature=inf_temp, max_workers=jobs,
        )
        _write_steps_json(out, stem, explanations)
        annotated = attach_explanations(proof_tree, explanations)
        statement_nl = informalize_statement(
            trace.theorem_statement, stmt_premises, stmt_fewshots, backend,
            model=model, temperature=inf_temp,
        )

        subproofs: list[SubProof] = []
        proof = summarize_tree(
            annotated, statement_nl, backend, mode,
            model=model, temperature=sum_temp, max_child_chars=budget,
            on_subproof=subproofs.append,
        )
        proof_path = out / f"{stem}.proof.txt"
        proof_path.write_text(proof + "\n", encoding="utf-8")
        if subproof_dir is not None:
            sp_dir = pathlib.Path(subproof_dir)
            sp_dir.mkdir(parents=True, exist_ok=True)
            for sp in subproofs:
                (sp_dir / f"{stem}.{sp.subtree_root}.subproof.txt").write_text(
                    f"goal: {sp.goal_text}\n\n{sp.body}\n", encoding="utf-8"
                )
        click.echo(f"wrote {proof_path}")


# ---------------------------------------------------------------------------
# eval


@cli.group("eval")
def eval_group():
    """Evaluation reports over recorded judgment files."""


@eval_group.command("tally")
@click.option("--judgments", "judgments_path", required=True)
@click.option("--config-id", required=True)
@click.option("--report", default="text", type=click.Choice(["text", "json"]), show_default=True)
@handle_errors
def eval_tally(judgments_path, config_id, report):
    """Per-label percentages for one template/library configuration."""
    judgments = load_step_judgments(_existing(judgments_path, "judgments"))
    result = tally(judgments, config_id)
    if report == "json":
        click.echo(json.dumps(result.to_jsonable(), indent=2, ensure_ascii=False))
    else:
        click.echo(result.format_text())


@eval_group.command("score")
@click.option("--criteria", "criteria_path", required=True)
@click.option("--report", default="text", type=click.Choice(["text", "json"]), show_default=True)
@handle_errors
def eval_score(criteria_path, report):
    """Key-point score over criterion judgments."""
    judgments = load_criterion_judgments(_existing(criteria_path, "criteria"))
    score = score_proof(judgments)
    if report == "json":
        click.echo(json.dumps({"criteria": len(judgments), "score": score,
                               "display": format_score(score)}, indent=2))
    else:
        click.echo(f"score={format_score(score)} over {len(judgments)} criteria")


@eval_group.command("mcnemar")
@click.option("--pairs", "pairs_path", required=True)
@click.option("--report", default="text", type=click.Choice(["text", "json"]), show_default=True)
@handle_errors
def eval_mcnemar(pairs_path, report):
    """Paired significance test over a file of per-item outcomes."""
    outcomes = load_paired_outcomes(_existing(pairs_path, "pairs"))
    a_only, b_only = discordant_counts(outcomes)
    result = mcnemar(a_only, b_only)
    if report == "json":
        click.echo(json.dumps({
            "a_only": a_only,
            "b_only": b_only,
            "chi_squared": result.chi_squared,
            "p_value": result.p_value,
        }, indent=2))
    else:
        click.echo(result.format_text())


def main(argv=None):
    # Run without click's standalone handling so usage problems exit with
    # the configuration code (1) instead of click's default 2, which is
    # reserved for backend failures.
    try:
        cli.main(args=argv, prog_name="leanprose", standalone_mode=False, obj={})
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(EXIT_CONFIG)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_CONFIG)


if __name__ == "__main__":
    main()
