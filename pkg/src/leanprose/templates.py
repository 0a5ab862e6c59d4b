"""Per-tactic generation templates and deterministic retrieval.

A catalog stores templates keyed by tactic kind plus a guard over usage
facts derived from the step's states. Retrieval picks the matching template
that constrains the most facts; ties break on the lowest template id so
catalog edits cannot silently reorder selection. Every catalog must carry a
``*`` fallback so unknown tactics still render.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping

from .errors import CatalogError, MissingSlot, ParseError
from .trace import ProofTrace, TacticStep

FALLBACK_KIND = "*"


@dataclass(frozen=True)
class SlotSpec:
    slot_name: str
    description: str


@dataclass(frozen=True)
class UsageFacts:
    """Booleans describing how a tactic used and changed the proof state."""

    rewrites_goal: bool = False
    rewrites_hypothesis: bool = False
    uses_theorems: bool = False
    uses_hypotheses: bool = False
    introduces_goal: bool = False
    closes_goal: bool = False


FACT_NAMES = tuple(f.name for f in dataclasses.fields(UsageFacts))

_SLOT_RE = re.compile(r"\[([A-Za-z_][A-Za-z0-9_]*)\]")


@dataclass(frozen=True)
class Template:
    template_id: str
    tactic_kind: str
    guard: tuple[tuple[str, bool], ...]
    body: str

    @property
    def specificity(self) -> int:
        return len(self.guard)

    def slots(self) -> list[str]:
        """Slot names referenced by the body, in order, deduplicated."""
        seen: list[str] = []
        for match in _SLOT_RE.finditer(self.body):
            name = match.group(1)
            if name not in seen:
                seen.append(name)
        return seen

    def matches(self, facts: UsageFacts) -> bool:
        return all(getattr(facts, name) == value for name, value in self.guard)


class TemplateCatalog:
    """Immutable template store, linted at construction."""

    def __init__(self, templates: Iterable[Template], slots: Iterable[SlotSpec], *, require_fallback: bool = True):
        self.templates = tuple(templates)
        slot_list = tuple(slots)
        self.slots = {s.slot_name: s for s in slot_list}
        if len(self.slots) < len(slot_list):
            raise CatalogError("duplicate slot names in catalog")
        self._lint(require_fallback)

    def _lint(self, require_fallback: bool) -> None:
        seen_ids = set()
        for template in self.templates:
            if template.template_id in seen_ids:
                raise CatalogError(f"duplicate template id '{template.template_id}'")
            seen_ids.add(template.template_id)
            for name, _ in template.guard:
                if name not in FACT_NAMES:
                    raise CatalogError(
                        f"template '{template.template_id}' guards unknown fact '{name}'"
                    )
            for slot in template.slots():
                if slot not in self.slots:
                    raise CatalogError(
                        f"template '{template.template_id}' references unknown slot [{slot}]"
                    )
        if require_fallback and not any(
            t.tactic_kind == FALLBACK_KIND and not t.guard for t in self.templates
        ):
            raise CatalogError("catalog lacks the unconditional '*' fallback template")

    @classmethod
    def from_jsonable(cls, doc, source: str = "<catalog>") -> "TemplateCatalog":
        if not isinstance(doc, dict):
            raise ParseError(f"{source}: catalog must be an object")
        for key in ("templates", "slots"):
            if key not in doc or not isinstance(doc[key], list):
                raise ParseError(f"{source}: missing '{key}' array")
        slots = []
        for i, raw in enumerate(doc["slots"]):
            if not isinstance(raw, dict) or not isinstance(raw.get("name"), str) or not isinstance(raw.get("description"), str):
                raise ParseError(f"{source}: slots[{i}]: expected {{name, description}}")
            if not raw["description"]:
                raise CatalogError(f"{source}: slot '{raw['name']}' has an empty description")
            slots.append(SlotSpec(raw["name"], raw["description"]))
        templates = []
        for i, raw in enumerate(doc["templates"]):
            if not isinstance(raw, dict):
                raise ParseError(f"{source}: templates[{i}]: expected an object")
            for key in ("id", "tactic", "body"):
                if not isinstance(raw.get(key), str):
                    raise ParseError(f"{source}: templates[{i}]: missing string field '{key}'")
            guard_raw = raw.get("guard", {})
            if not isinstance(guard_raw, dict) or not all(isinstance(v, bool) for v in guard_raw.values()):
                raise ParseError(f"{source}: templates[{i}].guard: expected {{fact: bool}}")
            templates.append(
                Template(
                    template_id=raw["id"],
                    tactic_kind=raw["tactic"],
                    guard=tuple(sorted(guard_raw.items())),
                    body=raw["body"],
                )
            )
        return cls(templates, slots)

    @classmethod
    def load(cls, path) -> "TemplateCatalog":
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ParseError(f"{path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        return cls.from_jsonable(doc, source=str(path))

    @classmethod
    def default(cls) -> "TemplateCatalog":
        text = resources.files("leanprose.data").joinpath("catalog.json").read_text("utf-8")
        return cls.from_jsonable(json.loads(text), source="<default catalog>")


# ---------------------------------------------------------------------------
# Usage-fact derivation

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.']*")

# Textual cues that a hypothesis states a fact rather than binding a typed
# variable ("h1 : a = r1 + r1" vs "r2 : ℕ"). Arrows are deliberately absent:
# they also form function types.
_PROPOSITION_MARKERS = (
    "=", "≤", "≥", "<", ">", "≠", "∈", "∉", "⊆", "⊂", "∀", "∃", "∧", "∨", "↔", "¬", "∣",
)


def _is_propositional(statement: str) -> bool:
    if any(marker in statement for marker in _PROPOSITION_MARKERS):
        return True
    parts = statement.split(maxsplit=1)
    # Applied predicates such as "Even a" or "Nat.Prime p".
    return len(parts) == 2 and parts[0][:1].isascii() and parts[0][:1].isupper()


def _argument_tokens(tactic_text: str) -> list[str]:
    tokens = _IDENT_RE.findall(tactic_text)
    return tokens[1:]


def derive_usage_facts(step: TacticStep, trace: ProofTrace) -> UsageFacts:
    """Compute the guard facts for one step from its states and arguments.

    Hypothesis usage counts only labels whose statement reads as a fact;
    typed variable bindings passed as theorem instantiation arguments (for
    example ``Nat.add_comm r2``) do not make a step hypothesis-driven.
    """
    if step not in trace.steps:
        raise ValueError(f"step '{step.step_id}' does not belong to the given trace")
    before, after = step.state_before, step.state_after
    before_map, after_map = before.hypothesis_map(), after.hypothesis_map()

    fact_labels = {label for label, stmt in before.hypotheses if _is_propositional(stmt)}
    arguments = set(_argument_tokens(step.tactic_text))

    return UsageFacts(
        rewrites_goal=len(before.goals) == len(after.goals) and before.goals != after.goals,
        rewrites_hypothesis=any(
            before_map[label] != after_map[label] for label in before_map.keys() & after_map.keys()
        ),
        uses_theorems=bool(step.premise_refs),
        uses_hypotheses=bool(arguments & fact_labels),
        introduces_goal=len(after.goals) > len(before.goals),
        closes_goal=len(after.goals) < len(before.goals),
    )


# ---------------------------------------------------------------------------
# Retrieval and rendering


def select_template(catalog: TemplateCatalog, tactic_kind: str, facts: UsageFacts) -> Template:
    """Most specific matching template; falls back to the ``*`` entry."""
    candidates = [
        t for t in catalog.templates if t.tactic_kind == tactic_kind and t.matches(facts)
    ]
    if not candidates:
        candidates = [
            t for t in catalog.templates if t.tactic_kind == FALLBACK_KIND and t.matches(facts)
        ]
    if not candidates:
        raise CatalogError(
            f"no template matches tactic '{tactic_kind}' and the fallback is absent"
        )
    return min(candidates, key=lambda t: (-t.specificity, t.template_id))


def render_skeleton(template: Template, slot_values: Mapping[str, str]) -> str:
    """Fill every ``[slot]`` in the body; everything else is left untouched."""

    def fill(match: re.Match) -> str:
        name = match.group(1)
        if name not in slot_values:
            raise MissingSlot(name)
        return slot_values[name]

    return _SLOT_RE.sub(fill, template.body)
