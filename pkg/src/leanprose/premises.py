"""Premise library: natural-language explanations for theorems and definitions.

Modules are levelled along their import graph (level 0 for import-free
modules, otherwise one more than the highest-levelled import), and
explanations are generated level by level so that a record's dependencies
are already explained when its prompt is assembled. Few-shot records come
from the same module or field and are drawn with a per-record seeded RNG,
so resuming a partially built library never shifts later draws.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .backend import (
    Backend,
    ChatMessage,
    ChatRequest,
    DEFAULT_MODEL,
    INFORMALIZE_TEMPERATURE,
)
from .errors import BackendError, CycleError, InsufficientFewshotWarning, ParseError, ValidationError

FEWSHOT_COUNT = 3


@dataclass
class ModuleNode:
    module_path: str
    imports: tuple[str, ...] = ()
    level: int | None = None


@dataclass(frozen=True)
class PremiseRecord:
    name: str
    kind: str  # "theorem" | "definition"
    statement_type: str
    defining_module: str
    field_tags: tuple[str, ...] = ()
    depends_on: tuple[str, ...] = ()
    explanation: str = ""


@dataclass
class PremiseLibrary:
    records: dict[str, PremiseRecord] = field(default_factory=dict)
    modules: dict[str, ModuleNode] = field(default_factory=dict)

    def lookup(self, names: Sequence[str]) -> tuple[list[PremiseRecord], list[str]]:
        """Records for every found name, in request order; missing names
        are reported alongside rather than silently dropped."""
        found: list[PremiseRecord] = []
        missing: list[str] = []
        for name in names:
            record = self.records.get(name)
            if record is None:
                missing.append(name)
            else:
                found.append(record)
        return found, missing


def level_modules(modules: Iterable[ModuleNode]) -> dict[str, int]:
    """Assign the minimal level satisfying level(m) > level(i) for imports.

    Imports that are not part of the given module set are treated as
    external and ignored. Raises CycleError naming one witness cycle.
    """
    by_path = {m.module_path: m for m in modules}
    levels: dict[str, int] = {}
    in_progress: list[str] = []
    in_progress_set: set[str] = set()

    def visit(path: str) -> int:
        if path in levels:
            return levels[path]
        if path in in_progress_set:
            cycle = in_progress[in_progress.index(path):] + [path]
            raise CycleError(cycle)
        in_progress.append(path)
        in_progress_set.add(path)
        known_imports = [i for i in by_path[path].imports if i in by_path]
        level = 0 if not known_imports else 1 + max(visit(i) for i in known_imports)
        in_progress.pop()
        in_progress_set.remove(path)
        levels[path] = level
        return level

    for path in by_path:
        visit(path)
    return levels


def _record_level(record: PremiseRecord, levels: dict[str, int]) -> int:
    # Records from modules absent from the import map sort first.
    return levels.get(record.defining_module, 0)


def _fewshot_candidates(record: PremiseRecord, library: PremiseLibrary) -> list[PremiseRecord]:
    tags = set(record.field_tags)
    return sorted(
        (
            r
            for r in library.records.values()
            if r.name != record.name
            and (r.defining_module == record.defining_module or (tags and tags & set(r.field_tags)))
        ),
        key=lambda r: r.name,
    )


def assemble_premise_prompt(
    record: PremiseRecord,
    dependency_records: Sequence[PremiseRecord],
    fewshots: Sequence[PremiseRecord],
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = INFORMALIZE_TEMPERATURE,
) -> ChatRequest:
    system = (
        "You are an expert in Lean4 and formal mathematics.\n"
        "Write one explanatory sentence in natural language for the given Lean4 theorem or "
        "definition, stating precisely what it expresses.\n"
        "# Notes\n"
        "- Do not use formal language syntax in the explanation.\n"
        "- If explanations of dependencies are provided, refer to those concepts the same way "
        "the explanations do.\n"
        "- Write exactly one sentence."
    )
    lines: list[str] = []
    if fewshots:
        lines.append("# Related Declarations")
        for shot in fewshots:
            lines.append(f"- {shot.name} ({shot.kind}) : {shot.statement_type}")
            if shot.explanation:
                lines.append(f"  Explanation: {shot.explanation}")
        lines.append("")
    if dependency_records:
        lines.append("# Dependencies")
        for dep in dependency_records:
            lines.append(f"- {dep.name}: {dep.explanation}")
        lines.append("")
    lines.append("# Input")
    lines.append(f"**Name**: {record.name}")
    lines.append(f"**Kind**: {record.kind}")
    lines.append(f"**Formal Type**: {record.statement_type}")
    lines.append("**Explanation**:")
    return ChatRequest(
        model=model,
        temperature=temperature,
        messages=(ChatMessage("system", system), ChatMessage("user", "\n".join(lines))),
    )


def generate_explanations(
    library: PremiseLibrary,
    backend: Backend,
    fewshot_rng_seed: int,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = INFORMALIZE_TEMPERATURE,
) -> PremiseLibrary:
    """Fill in missing explanations, lowest module level first.

    Records that already carry an explanation are kept as-is, so re-running
    over a partially built library resumes instead of regenerating.
    """
    levels = level_modules(library.modules.values())
    ordered = sorted(
        library.records.values(),
        key=lambda r: (_record_level(r, levels), r.defining_module, r.name),
    )
    new_records = dict(library.records)
    for record in ordered:
        if record.explanation:
            continue
        dependency_records = [
            new_records[name]
            for name in record.depends_on
            if name in new_records and new_records[name].explanation
        ]
        candidates = _fewshot_candidates(record, library)
        if len(candidates) < FEWSHOT_COUNT:
            warnings.warn(
                InsufficientFewshotWarning(
                    f"{record.name}: only {len(candidates)} few-shot candidates available"
                )
            )
        rng = random.Random(f"{fewshot_rng_seed}:{record.name}")
        fewshots = rng.sample(candidates, min(FEWSHOT_COUNT, len(candidates)))
        request = assemble_premise_prompt(
            record, dependency_records, fewshots, model=model, temperature=temperature
        )
        try:
            text = backend.complete(request)
        except BackendError as exc:
            raise BackendError(exc.kind, f"while explaining {record.name}: {exc}") from exc
        if not text.strip():
            raise BackendError("malformed_response", f"empty explanation for {record.name}")
        new_records[record.name] = replace(record, explanation=text)
    return PremiseLibrary(records=new_records, modules=dict(library.modules))


# ---------------------------------------------------------------------------
# Persistence: JSON-lines, one record per line.


def load_library(path, modules: dict[str, ModuleNode] | None = None) -> PremiseLibrary:
    records: dict[str, PremiseRecord] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"{path}:{lineno}: {exc.msg}") from exc
                for key in ("name", "kind", "type", "module"):
                    if not isinstance(doc.get(key), str):
                        raise ParseError(f"{path}:{lineno}: missing string field '{key}'")
                if doc["kind"] not in ("theorem", "definition"):
                    raise ValidationError(f"{path}:{lineno}: kind must be theorem or definition")
                name = doc["name"]
                if name in records:
                    raise ValidationError(f"{path}:{lineno}: duplicate record '{name}'")
                records[name] = PremiseRecord(
                    name=name,
                    kind=doc["kind"],
                    statement_type=doc["type"],
                    defining_module=doc["module"],
                    field_tags=tuple(doc.get("fields", [])),
                    depends_on=tuple(doc.get("depends_on", [])),
                    explanation=doc.get("explanation", ""),
                )
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    return PremiseLibrary(records=records, modules=dict(modules or {}))


def save_library(library: PremiseLibrary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in library.records.values():
            fh.write(
                json.dumps(
                    {
                        "name": record.name,
                        "kind": record.kind,
                        "type": record.statement_type,
                        "module": record.defining_module,
                        "fields": list(record.field_tags),
                        "depends_on": list(record.depends_on),
                        "explanation": record.explanation,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_modules(path) -> dict[str, ModuleNode]:
    """Read the sidecar import map: a JSON object {module_path: [imports]}."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or not all(
        isinstance(v, list) and all(isinstance(i, str) for i in v) for v in doc.values()
    ):
        raise ParseError(f"{path}: expected {{module_path: [imports...]}}")
    return {path_: ModuleNode(module_path=path_, imports=tuple(imports)) for path_, imports in doc.items()}
