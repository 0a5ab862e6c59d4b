"""Step-wise informalization: one natural-language sentence per proof step.

Each step's prompt carries a fixed instruction block, few-shot examples for
the step's tactic kind, the proof states before and after, explanations of
the premises the tactic used, and the selected template with its slot
descriptions. Assembly is deterministic and locked by golden files under
``prompts/``; replies are linted for formal-syntax leakage but never
rewritten.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

from .backend import (
    Backend,
    ChatMessage,
    ChatRequest,
    DEFAULT_MODEL,
    INFORMALIZE_TEMPERATURE,
)
from .errors import BackendError, ConfigError, InsufficientFewshotWarning, ParseError
from .premises import PremiseLibrary, PremiseRecord
from .templates import Template, TemplateCatalog, derive_usage_facts, select_template
from .trace import ProofTrace, TacticStep

FALLBACK_KIND = "*"
DEFAULT_STEP_FEWSHOTS = 2


@dataclass(frozen=True)
class FewshotExample:
    """One worked example of the step-informalization task."""

    tactic_kind: str
    applied_tactic: str
    goals_before: str
    goals_after: str
    premises: tuple[tuple[str, str], ...]
    output: str


@dataclass(frozen=True)
class StatementExample:
    """One worked example of theorem-statement informalization."""

    statement: str
    premises: tuple[tuple[str, str], ...]
    output: str


@dataclass(frozen=True)
class StepExplanation:
    step_id: str
    text: str
    template_id: str
    flags: tuple[str, ...] = ()


INFORMALIZE_SYSTEM_PROMPT = """You are an expert in Lean4 and formal mathematics.
Transform the given Lean4 tactic into a clear and concise natural language explanation, accurately conveying the operation performed as a step in a mathematical proof without using the format of the formal language.
Ensure that any predicates from the formal language are not included in the explanation.
# Steps
1. **Understand the Applied Tactic**:
- Analyze the `Applied Tactic` to comprehend its function within the proof.
  - If a tactic involves using one or more theorems or definitions, read the theorems listed under `Using Definitions and Theorems` and ensure you understand their content.
2. **Examine Hypotheses and Goals**:
- Compare `Hypotheses And Goals Before Tactic Application` with `Hypotheses And Goals After Tactic Application` to understand what changes in objectives occurred.
  - Hypotheses and goals are separated with the symbol '⊢'.
3. **Formulate the Explanation**:
- Describe what action the tactic took, referring only to what was altered based on the changes observed in the hypotheses and goals.
- Avoid directly referencing predicates from the formal language.
  - When referring to variables, be sure to explicitly use these variable names in the output.
    - (ex) Set $ A $ is Empty.
  - **Do not** include the names of theorems or definitions in formal languages, or variables used as aliases to specific expressions (like h : x = 2 * y) in the output. Instead, explain the content in natural language.
- Fill every slot of the given template so that the completed sentence follows the template.
# Output Format
- Provide a natural language explanation summarizing the operation of the tactic and the immediate effects on the hypotheses and goals.
  - Provide all necessary information for the explanation in precise and detailed terms.
# Notes
- Always determine what assumptions or definitions are brought into effect or altered.
- Make sure explanations are precise to maintain clarity and avoid unnecessary details.
- Do not include expressions written in Lean's formal language in the output.
  - In formal proofs, casts such as from natural numbers to integers are represented by ↑. Therefore, ensure that the output does not contain ↑ representing a cast.
- If you use explanations or citations to output formulas, please use TeX formatting for citations if the formulas are not complex, or use explanations written in natural language if the formulas are complex."""


STATEMENT_SYSTEM_PROMPT = """You are an expert in Lean4 and formal mathematics.
Rewrite the given formal theorem statement as one clear natural language sentence stating what is to be proven.
# Notes
- Do not use formal language syntax, theorem names, or binder notation in the output.
- Use the provided definition explanations to refer to each concept by its mathematical name.
- Use TeX formatting for formulas if they are not complex; otherwise describe them in words."""


def _premise_lines(pairs: Sequence[tuple[str, str]]) -> list[str]:
    return [f"- {name}: {text}" for name, text in pairs]


def _fewshot_block(index: int, shot: FewshotExample) -> list[str]:
    lines = [
        f"### Example {index}",
        "**Input Information**:",
        f"- Applied Tactic: {shot.applied_tactic}",
        f"- Hypotheses And Goals Before Tactic Application: {shot.goals_before}",
        f"- Hypotheses And Goals After Tactic Application: {shot.goals_after}",
    ]
    if shot.premises:
        lines.append("**Using Definitions and Theorems**:")
        lines.extend(_premise_lines(shot.premises))
    lines.append("**Output**:")
    lines.append(f"- {shot.output}")
    return lines


def assemble_informalize_prompt(
    step: TacticStep,
    template: Template,
    premises: Sequence[PremiseRecord],
    fewshots: Sequence[FewshotExample],
    catalog: TemplateCatalog,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = INFORMALIZE_TEMPERATURE,
) -> ChatRequest:
    """Deterministic two-message request for one step.

    The premise block is omitted entirely when the step used no premises;
    each slot named by the template is described exactly once.
    """
    lines: list[str] = []
    if fewshots:
        lines.append("# Examples")
        for i, shot in enumerate(fewshots, 1):
            lines.extend(_fewshot_block(i, shot))
            lines.append("")
    lines.append(
        "Using the example above as a reference, please explain the following input "
        "in natural language as one operation in a mathematical proof."
    )
    lines.append("**Input Information**:")
    lines.append(f"- Applied Tactic: {step.tactic_text}")
    lines.append(f"- Hypotheses And Goals Before Tactic Application: {step.state_before.render()}")
    lines.append(f"- Hypotheses And Goals After Tactic Application: {step.state_after.render()}")
    if premises:
        lines.append("**Using Definitions and Theorems**:")
        lines.extend(_premise_lines([(p.name, p.explanation or p.statement_type) for p in premises]))
    lines.append("**Template**:")
    lines.append(template.body)
    lines.append("**Slot Descriptions**:")
    for slot_name in template.slots():
        lines.append(f"- {slot_name}: {catalog.slots[slot_name].description}")
    lines.append("**Output**:")
    return ChatRequest(
        model=model,
        temperature=temperature,
        messages=(
            ChatMessage("system", INFORMALIZE_SYSTEM_PROMPT),
            ChatMessage("user", "\n".join(lines)),
        ),
    )


def select_fewshots(
    pool: Sequence[FewshotExample], tactic_kind: str, k: int
) -> list[FewshotExample]:
    """Up to ``k`` pool entries of the exact kind, in pool order; kinds with
    no entries fall back to the ``*`` pool."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not pool:
        warnings.warn(InsufficientFewshotWarning("the few-shot pool is empty"))
        return []
    matches = [shot for shot in pool if shot.tactic_kind == tactic_kind]
    if not matches:
        matches = [shot for shot in pool if shot.tactic_kind == FALLBACK_KIND]
        if not matches:
            warnings.warn(
                InsufficientFewshotWarning(
                    f"no few-shot examples for tactic '{tactic_kind}' and no '*' pool"
                )
            )
    return matches[:k]


_BACKTICK_RE = re.compile(r"`[^`]+`")
_LAMBDA_RE = re.compile(r"\bfun\b[^\n]*?=>")


def lint_explanation(text: str, premise_names: Sequence[str]) -> tuple[str, ...]:
    """Flag (never rewrite) formal-syntax leakage in a generated reply."""
    leaking = (
        "⊢" in text
        or "↑" in text
        or _BACKTICK_RE.search(text) is not None
        or _LAMBDA_RE.search(text) is not None
        or any(
            re.search(rf"(?<![A-Za-z0-9_.']){re.escape(name)}(?![A-Za-z0-9_.'])", text)
            for name in premise_names
        )
    )
    return ("contains_formal_syntax",) if leaking else ()


def informalize_step(
    step: TacticStep,
    trace: ProofTrace,
    library: PremiseLibrary,
    catalog: TemplateCatalog,
    pool: Sequence[FewshotExample],
    backend: Backend,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = INFORMALIZE_TEMPERATURE,
    fewshot_count: int = DEFAULT_STEP_FEWSHOTS,
) -> StepExplanation:
    request, template = build_step_request(
        step, trace, library, catalog, pool,
        model=model, temperature=temperature, fewshot_count=fewshot_count,
    )
    try:
        reply = backend.complete(request)
    except BackendError as exc:
        raise BackendError(exc.kind, f"step {step.step_id}: {exc}") from exc
    if not reply.strip():
        raise BackendError("malformed_response", f"empty completion for step {step.step_id}")
    flags = lint_explanation(reply, [p for p in step.premise_refs])
    return StepExplanation(step_id=step.step_id, text=reply, template_id=template.template_id, flags=flags)


def build_step_request(
    step: TacticStep,
    trace: ProofTrace,
    library: PremiseLibrary,
    catalog: TemplateCatalog,
    pool: Sequence[FewshotExample],
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = INFORMALIZE_TEMPERATURE,
    fewshot_count: int = DEFAULT_STEP_FEWSHOTS,
) -> tuple[ChatRequest, Template]:
    """The deterministic half of informalize_step (usable for --dry-run)."""
    facts = derive_usage_facts(step, trace)
    template = select_template(catalog, step.tactic_kind, facts)
    found, missing = library.lookup(step.premise_refs)
    # Premises absent from the library still appear in the prompt, showing
    # their formal type instead of an explanation.
    premises: list[PremiseRecord] = list(found)
    for name in missing:
        ref = trace.premise(name)
        premises.append(
            PremiseRecord(
                name=ref.name,
                kind="theorem",
                statement_type=ref.statement_type,
                defining_module=ref.defining_module,
            )
        )
    premises.sort(key=lambda p: step.premise_refs.index(p.name))
    fewshots = select_fewshots(pool, step.tactic_kind, fewshot_count)
    request = assemble_informalize_prompt(
        step, template, premises, fewshots, catalog, model=model, temperature=temperature
    )
    return request, template


def informalize_trace(
    trace: ProofTrace,
    library: PremiseLibrary,
    catalog: TemplateCatalog,
    pool: Sequence[FewshotExample],
    backend: Backend,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = INFORMALIZE_TEMPERATURE,
    fewshot_count: int = DEFAULT_STEP_FEWSHOTS,
    max_workers: int = 1,
) -> dict[str, StepExplanation]:
    """Informalize every step; steps are independent, so order of completion
    does not matter and results are keyed by step id."""

    def run(step: TacticStep) -> StepExplanation:
        return informalize_step(
            step, trace, library, catalog, pool, backend,
            model=model, temperature=temperature, fewshot_count=fewshot_count,
        )

    if max_workers <= 1 or len(trace.steps) <= 1:
        return {step.step_id: run(step) for step in trace.steps}
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=max_workers) as pool_exec:
        results = list(pool_exec.map(run, trace.steps))
    return {expl.step_id: expl for expl in results}


# ---------------------------------------------------------------------------
# Theorem-statement informalization (used as the summarizer's root text)

_STATEMENT_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.']*")


def statement_premises(statement: str, library: PremiseLibrary) -> list[PremiseRecord]:
    """Library records whose names occur in the statement, first-use order."""
    seen: list[str] = []
    for token in _STATEMENT_IDENT_RE.findall(statement):
        if token in library.records and token not in seen:
            seen.append(token)
    return [library.records[name] for name in seen]


def assemble_statement_prompt(
    theorem_statement: str,
    premises: Sequence[PremiseRecord],
    fewshots: Sequence[StatementExample],
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = INFORMALIZE_TEMPERATURE,
) -> ChatRequest:
    lines: list[str] = ["# Examples"]
    for i, shot in enumerate(fewshots, 1):
        lines.append(f"### Example {i}")
        lines.append("**Formal Statement**:")
        lines.append(shot.statement)
        if shot.premises:
            lines.append("**Using Definitions and Theorems**:")
            lines.extend(_premise_lines(shot.premises))
        lines.append("**Output**:")
        lines.append(f"- {shot.output}")
        lines.append("")
    lines.append(
        "Using the examples above as a reference, state the following theorem in natural language."
    )
    lines.append("**Formal Statement**:")
    lines.append(theorem_statement)
    if premises:
        lines.append("**Using Definitions and Theorems**:")
        lines.extend(_premise_lines([(p.name, p.explanation or p.statement_type) for p in premises]))
    lines.append("**Output**:")
    return ChatRequest(
        model=model,
        temperature=temperature,
        messages=(
            ChatMessage("system", STATEMENT_SYSTEM_PROMPT),
            ChatMessage("user", "\n".join(lines)),
        ),
    )


def informalize_statement(
    theorem_statement: str,
    premises: Sequence[PremiseRecord],
    fewshots_stmt: Sequence[StatementExample],
    backend: Backend,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = INFORMALIZE_TEMPERATURE,
) -> str:
    if not theorem_statement:
        raise ValueError("theorem statement must be non-empty")
    if len(fewshots_stmt) != 3:
        raise ConfigError(
            f"statement informalization needs exactly 3 few-shot examples, got {len(fewshots_stmt)}"
        )
    request = assemble_statement_prompt(
        theorem_statement, premises, fewshots_stmt, model=model, temperature=temperature
    )
    reply = backend.complete(request)
    if not reply.strip():
        raise BackendError("malformed_response", "empty completion for theorem statement")
    return reply


# ---------------------------------------------------------------------------
# Few-shot pool files


def load_fewshot_pool(path=None) -> list[FewshotExample]:
    """JSON array of step examples; defaults to the packaged pool."""
    if path is None:
        text = resources.files("leanprose.data").joinpath("fewshots.json").read_text("utf-8")
        source = "<default fewshots>"
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"{path}: {exc.strerror or exc}") from exc
        source = str(path)
    return _parse_fewshot_pool(text, source)


def _parse_fewshot_pool(text: str, source: str) -> list[FewshotExample]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, list):
        raise ParseError(f"{source}: expected a JSON array")
    pool = []
    for i, raw in enumerate(doc):
        try:
            pool.append(
                FewshotExample(
                    tactic_kind=raw["tactic_kind"],
                    applied_tactic=raw["applied_tactic"],
                    goals_before=raw["goals_before"],
                    goals_after=raw["goals_after"],
                    premises=tuple((n, e) for n, e in raw.get("premises", [])),
                    output=raw["output"],
                )
            )
        except (TypeError, KeyError, ValueError) as exc:
            raise ParseError(f"{source}[{i}]: malformed few-shot example ({exc})") from exc
    return pool


def load_statement_fewshots(path=None) -> list[StatementExample]:
    """Exactly three statement examples; anything else is a startup error."""
    if path is None:
        text = resources.files("leanprose.data").joinpath("statement_fewshots.json").read_text("utf-8")
        source = "<default statement fewshots>"
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"{path}: {exc.strerror or exc}") from exc
        source = str(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, list):
        raise ParseError(f"{source}: expected a JSON array")
    shots = []
    for i, raw in enumerate(doc):
        try:
            shots.append(
                StatementExample(
                    statement=raw["statement"],
                    premises=tuple((n, e) for n, e in raw.get("premises", [])),
                    output=raw["output"],
                )
            )
        except (TypeError, KeyError, ValueError) as exc:
            raise ParseError(f"{source}[{i}]: malformed statement example ({exc})") from exc
    if len(shots) != 3:
        raise ConfigError(f"{source}: statement few-shot file must contain exactly 3 examples, got {len(shots)}")
    return shots
