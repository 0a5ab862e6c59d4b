"""Canonical interchange format for extracted formal-proof traces.

A trace file is one UTF-8 JSON document describing a single theorem: the
statement, the ordered tactic steps with proof states before and after each
application, the premises (theorems and definitions) referenced by the steps,
and a syntax tree relating steps to the blocks that contain them.

Loading validates the document and returns an immutable ``ProofTrace``.
Formal text is kept verbatim, including Unicode (⊢, ∀, ℕ); traces are safe to
share across threads once loaded.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import ParseError, ValidationError

Position = tuple[int, int]
Span = tuple[Position, Position]


@dataclass(frozen=True)
class ProofState:
    """Named hypotheses and remaining goals at one point in a proof."""

    hypotheses: tuple[tuple[str, str], ...] = ()
    goals: tuple[str, ...] = ()

    def hypothesis_map(self) -> dict[str, str]:
        return dict(self.hypotheses)

    def render(self) -> str:
        """One-line ``hypotheses ⊢ goals`` form used in prompts."""
        if not self.goals:
            return "no goals"
        goals = " | ".join(self.goals)
        if not self.hypotheses:
            return f"⊢ {goals}"
        hyps = ", ".join(f"{label} : {statement}" for label, statement in self.hypotheses)
        return f"{hyps} ⊢ {goals}"


@dataclass(frozen=True)
class TacticStep:
    """One applied tactic with its surrounding proof states."""

    step_id: str
    tactic_text: str
    tactic_kind: str
    state_before: ProofState
    state_after: ProofState
    premise_refs: tuple[str, ...] = ()
    source_span: Span = ((0, 0), (0, 0))


@dataclass(frozen=True)
class PremiseRef:
    """A theorem or definition referenced from a proof step."""

    name: str
    statement_type: str
    defining_module: str


@dataclass(frozen=True)
class AstNode:
    """One syntax-tree node; ``children`` are node ids, not nested nodes."""

    node_id: str
    kind: str
    children: tuple[str, ...] = ()
    owning_step: str | None = None
    introduces: tuple[str, ...] = ()
    mentions: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProofTrace:
    theorem_name: str
    theorem_statement: str
    steps: tuple[TacticStep, ...]
    premises: tuple[PremiseRef, ...]
    ast_root: str
    ast_nodes: dict[str, AstNode]

    def step(self, step_id: str) -> TacticStep:
        for s in self.steps:
            if s.step_id == step_id:
                return s
        raise KeyError(step_id)

    def premise(self, name: str) -> PremiseRef:
        for p in self.premises:
            if p.name == name:
                return p
        raise KeyError(name)

    def ast_parents(self) -> dict[str, str]:
        """Map child node id -> parent node id (root absent)."""
        parents: dict[str, str] = {}
        for node in self.ast_nodes.values():
            for child in node.children:
                parents[child] = node.node_id
        return parents


# Leading markers that focus or chain tactics rather than being tactics.
_COMBINATOR_MARKERS = ("·", ".", "<;>")
_HEAD_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_'!?]*")


def classify_tactic_kind(tactic_text: str) -> str:
    """Return the leading tactic token with focus markers stripped.

    Unknown tactics yield their literal head token; total over non-empty
    input.
    """
    text = tactic_text.strip()
    if not text:
        raise ValueError("tactic_text must be non-empty")
    stripped = True
    while stripped:
        stripped = False
        for marker in _COMBINATOR_MARKERS:
            if text.startswith(marker) and (len(text) == len(marker) or text[len(marker)].isspace()):
                text = text[len(marker):].lstrip()
                stripped = True
    if not text:
        # Nothing but markers; fall back to the raw head token.
        return tactic_text.strip().split()[0]
    match = _HEAD_TOKEN_RE.match(text)
    if match:
        return match.group(0)
    return text.split()[0]


# ---------------------------------------------------------------------------
# Parsing


def _require(mapping: dict, key: str, kind: type, path: str, source: str):
    if not isinstance(mapping, dict):
        raise ParseError(f"{source}: {path}: expected an object")
    if key not in mapping:
        raise ParseError(f"{source}: {path}: missing required field '{key}'")
    value = mapping[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParseError(f"{source}: {path}.{key}: expected a number")
        return value
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ParseError(f"{source}: {path}.{key}: expected {kind.__name__}")
    return value


def _parse_state(obj, path: str, source: str) -> ProofState:
    hyps_raw = _require(obj, "hyps", list, path, source)
    goals_raw = _require(obj, "goals", list, path, source)
    hyps = []
    for i, pair in enumerate(hyps_raw):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise ParseError(f"{source}: {path}.hyps[{i}]: expected a [label, statement] pair")
        hyps.append((pair[0], pair[1]))
    for i, goal in enumerate(goals_raw):
        if not isinstance(goal, str):
            raise ParseError(f"{source}: {path}.goals[{i}]: expected a string")
    return ProofState(hypotheses=tuple(hyps), goals=tuple(goals_raw))


def _parse_span(value, path: str, source: str) -> Span:
    ok = (
        isinstance(value, list)
        and len(value) == 2
        and all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(c, int) and not isinstance(c, bool) for c in p)
            for p in value
        )
    )
    if not ok:
        raise ParseError(f"{source}: {path}: expected [[line, col], [line, col]]")
    return ((value[0][0], value[0][1]), (value[1][0], value[1][1]))


def _parse_ast(obj, path: str, source: str, nodes: dict[str, AstNode]) -> str:
    node_id = _require(obj, "id", str, path, source)
    kind = _require(obj, "kind", str, path, source)
    children_raw = _require(obj, "children", list, path, source)
    introduces = _require(obj, "introduces", list, path, source)
    mentions = _require(obj, "mentions", list, path, source)
    owning_step = obj.get("step")
    if owning_step is not None and not isinstance(owning_step, str):
        raise ParseError(f"{source}: {path}.step: expected a string")
    for field_name, items in (("introduces", introduces), ("mentions", mentions)):
        if not all(isinstance(x, str) for x in items):
            raise ParseError(f"{source}: {path}.{field_name}: expected strings")
    child_ids = []
    for i, child in enumerate(children_raw):
        child_ids.append(_parse_ast(child, f"{path}.children[{i}]", source, nodes))
    if node_id in nodes:
        raise ValidationError(f"{source}: duplicate AST node id '{node_id}'")
    nodes[node_id] = AstNode(
        node_id=node_id,
        kind=kind,
        children=tuple(child_ids),
        owning_step=owning_step,
        introduces=tuple(introduces),
        mentions=tuple(mentions),
    )
    return node_id


def parse_trace(text: str, source: str = "<string>") -> ProofTrace:
    """Parse and validate one canonical trace document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")

    theorem_name = _require(doc, "theorem_name", str, "$", source)
    theorem_statement = _require(doc, "theorem_statement", str, "$", source)
    steps_raw = _require(doc, "steps", list, "$", source)
    premises_raw = _require(doc, "premises", list, "$", source)
    ast_raw = _require(doc, "ast", dict, "$", source)

    steps = []
    for i, raw in enumerate(steps_raw):
        path = f"steps[{i}]"
        step = TacticStep(
            step_id=_require(raw, "id", str, path, source),
            tactic_text=_require(raw, "tactic", str, path, source),
            tactic_kind=_require(raw, "kind", str, path, source),
            state_before=_parse_state(_require(raw, "before", dict, path, source), f"{path}.before", source),
            state_after=_parse_state(_require(raw, "after", dict, path, source), f"{path}.after", source),
            premise_refs=tuple(_require(raw, "premises", list, path, source)),
            source_span=_parse_span(_require(raw, "span", list, path, source), f"{path}.span", source),
        )
        if not all(isinstance(p, str) for p in step.premise_refs):
            raise ParseError(f"{source}: {path}.premises: expected strings")
        steps.append(step)

    premises = []
    for i, raw in enumerate(premises_raw):
        path = f"premises[{i}]"
        premises.append(
            PremiseRef(
                name=_require(raw, "name", str, path, source),
                statement_type=_require(raw, "type", str, path, source),
                defining_module=_require(raw, "module", str, path, source),
            )
        )

    nodes: dict[str, AstNode] = {}
    root_id = _parse_ast(ast_raw, "ast", source, nodes)

    trace = ProofTrace(
        theorem_name=theorem_name,
        theorem_statement=theorem_statement,
        steps=tuple(steps),
        premises=tuple(premises),
        ast_root=root_id,
        ast_nodes=nodes,
    )
    validate_trace(trace, source)
    return trace


def load_trace(path) -> ProofTrace:
    """Load and validate a canonical trace file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    return parse_trace(text, source=str(path))


# ---------------------------------------------------------------------------
# Validation


def _validate_state(state: ProofState, where: str, source: str) -> None:
    seen = set()
    for label, statement in state.hypotheses:
        if not label:
            raise ValidationError(f"{source}: {where}: empty hypothesis label")
        if label in seen:
            raise ValidationError(f"{source}: {where}: duplicate hypothesis label '{label}'")
        seen.add(label)
        if not statement:
            raise ValidationError(f"{source}: {where}: empty statement for hypothesis '{label}'")
    for goal in state.goals:
        if not goal:
            raise ValidationError(f"{source}: {where}: empty goal statement")


def validate_trace(trace: ProofTrace, source: str = "<trace>") -> None:
    """Check every trace invariant; raise ValidationError on the first failure."""
    if not trace.theorem_name:
        raise ValidationError(f"{source}: theorem_name must be non-empty")
    if not trace.theorem_statement:
        raise ValidationError(f"{source}: theorem_statement must be non-empty")

    premise_names = {p.name for p in trace.premises}
    for p in trace.premises:
        if not p.name or not p.defining_module:
            raise ValidationError(f"{source}: premise entries need non-empty name and module")

    seen_ids: set[str] = set()
    prev_start: Position | None = None
    for step in trace.steps:
        if not step.step_id:
            raise ValidationError(f"{source}: empty step id")
        if step.step_id in seen_ids:
            raise ValidationError(f"{source}: duplicate step_id '{step.step_id}'")
        seen_ids.add(step.step_id)
        _validate_state(step.state_before, f"step '{step.step_id}' before-state", source)
        _validate_state(step.state_after, f"step '{step.step_id}' after-state", source)
        expected_kind = classify_tactic_kind(step.tactic_text)
        if step.tactic_kind != expected_kind:
            raise ValidationError(
                f"{source}: step '{step.step_id}' kind '{step.tactic_kind}' does not match "
                f"tactic head token '{expected_kind}'"
            )
        start, end = step.source_span
        if start > end:
            raise ValidationError(f"{source}: step '{step.step_id}' span start after end")
        if prev_start is not None and start < prev_start:
            raise ValidationError(f"{source}: step '{step.step_id}' out of source order")
        prev_start = start
        for name in step.premise_refs:
            if name not in premise_names:
                raise ValidationError(
                    f"{source}: step '{step.step_id}' references premise '{name}' "
                    "absent from the premises list"
                )

    _validate_ast(trace, seen_ids, source)


def _validate_ast(trace: ProofTrace, step_ids: set[str], source: str) -> None:
    nodes = trace.ast_nodes
    if trace.ast_root not in nodes:
        raise ValidationError(f"{source}: AST root '{trace.ast_root}' not among nodes")
    parent_count: dict[str, int] = {}
    for node in nodes.values():
        for child in node.children:
            if child not in nodes:
                raise ValidationError(f"{source}: AST node '{node.node_id}' references unknown child '{child}'")
            parent_count[child] = parent_count.get(child, 0) + 1
        if node.owning_step is not None and node.owning_step not in step_ids:
            raise ValidationError(
                f"{source}: AST node '{node.node_id}' owns unknown step '{node.owning_step}'"
            )
    for child, count in parent_count.items():
        if count > 1:
            raise ValidationError(f"{source}: AST node '{child}' has multiple parents")
    if trace.ast_root in parent_count:
        raise ValidationError(f"{source}: AST root '{trace.ast_root}' has a parent")

    # Reachability doubles as the cycle check: a rooted graph in which every
    # node has at most one parent and all nodes are reachable is a tree.
    visited: set[str] = set()
    stack = [trace.ast_root]
    while stack:
        node_id = stack.pop()
        if node_id in visited:
            raise ValidationError(f"{source}: AST contains a cycle through '{node_id}'")
        visited.add(node_id)
        stack.extend(nodes[node_id].children)
    unreachable = set(nodes) - visited
    if unreachable:
        raise ValidationError(
            f"{source}: AST nodes unreachable from root: {', '.join(sorted(unreachable))}"
        )


# ---------------------------------------------------------------------------
# Serialization


def _state_to_jsonable(state: ProofState) -> dict:
    return {"hyps": [list(pair) for pair in state.hypotheses], "goals": list(state.goals)}


def _ast_to_jsonable(trace: ProofTrace, node_id: str) -> dict:
    node = trace.ast_nodes[node_id]
    doc: dict = {"id": node.node_id, "kind": node.kind}
    doc["children"] = [_ast_to_jsonable(trace, child) for child in node.children]
    if node.owning_step is not None:
        doc["step"] = node.owning_step
    doc["introduces"] = list(node.introduces)
    doc["mentions"] = list(node.mentions)
    return doc


def trace_to_jsonable(trace: ProofTrace) -> dict:
    return {
        "theorem_name": trace.theorem_name,
        "theorem_statement": trace.theorem_statement,
        "steps": [
            {
                "id": s.step_id,
                "tactic": s.tactic_text,
                "kind": s.tactic_kind,
                "before": _state_to_jsonable(s.state_before),
                "after": _state_to_jsonable(s.state_after),
                "premises": list(s.premise_refs),
                "span": [list(s.source_span[0]), list(s.source_span[1])],
            }
            for s in trace.steps
        ],
        "premises": [
            {"name": p.name, "type": p.statement_type, "module": p.defining_module}
            for p in trace.premises
        ],
        "ast": _ast_to_jsonable(trace, trace.ast_root),
    }


def serialize_trace(trace: ProofTrace) -> str:
    """Canonical text form; parses back to an equal ProofTrace."""
    return json.dumps(trace_to_jsonable(trace), indent=2, ensure_ascii=False) + "\n"
