"""Dependency tree of proof steps.

The root carries the theorem statement; steps that open an intermediate
goal (``have``/``suffices``, detected structurally through syntax-tree
block ownership) become internal nodes whose children are the steps
discharging that goal. All other steps are leaves under the nearest
enclosing goal. Detection is structural, with the tactic-kind allowlist as
a cross-check: a step that owns nested steps but is not an allowlisted kind
raises StructureError rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import MissingExplanation, StructureError
from .trace import ProofTrace

ROOT_ID = "root"
DEFAULT_INTERMEDIATE_KINDS = frozenset({"have", "suffices"})


@dataclass
class ProofTreeNode:
    """Root (theorem statement) or one proof step; children in source order.

    Treat instances as immutable once built; attach_explanations returns a
    new annotated tree instead of mutating.
    """

    node_id: str
    step_id: str | None = None
    statement: str | None = None
    tactic_kind: str | None = None
    children: list["ProofTreeNode"] = field(default_factory=list)
    explanation: str | None = None

    @property
    def is_root(self) -> bool:
        return self.step_id is None

    def iter_nodes(self) -> Iterator["ProofTreeNode"]:
        yield self
        for child in self.children:
            yield from child.iter_nodes()

    def iter_steps(self) -> Iterator["ProofTreeNode"]:
        """Step nodes in source order (pre-order skips only the root)."""
        for node in self.iter_nodes():
            if not node.is_root:
                yield node

    def structure(self):
        """Nested (node_id, children) tuples for structural comparison."""
        return (self.node_id, tuple(child.structure() for child in self.children))


def _step_owner_nodes(trace: ProofTrace) -> dict[str, str]:
    """Map step_id -> the topmost syntax node owning it."""
    parents = trace.ast_parents()
    owners: dict[str, list[str]] = {}
    for node in trace.ast_nodes.values():
        if node.owning_step is not None:
            owners.setdefault(node.owning_step, []).append(node.node_id)

    def ancestors(node_id: str) -> set[str]:
        seen = set()
        while node_id in parents:
            node_id = parents[node_id]
            seen.add(node_id)
        return seen

    result: dict[str, str] = {}
    for step in trace.steps:
        candidates = owners.get(step.step_id)
        if not candidates:
            raise StructureError(
                f"step '{step.step_id}' has no owning syntax node; malformed trace"
            )
        # Keep only candidates with no other candidate above them.
        candidate_set = set(candidates)
        tops = [c for c in candidates if not (ancestors(c) & candidate_set)]
        if len(tops) != 1:
            raise StructureError(
                f"step '{step.step_id}' has ambiguous owning syntax nodes: {sorted(tops)}"
            )
        result[step.step_id] = tops[0]
    return result


def build_tree(
    trace: ProofTrace,
    intermediate_kinds: frozenset[str] = DEFAULT_INTERMEDIATE_KINDS,
) -> ProofTreeNode:
    """Pure construction; rebuilding yields a structurally equal tree."""
    owner_of_step = _step_owner_nodes(trace)
    node_owner: dict[str, str] = {v: k for k, v in owner_of_step.items()}
    parents = trace.ast_parents()

    def enclosing_step(step_id: str) -> str | None:
        node_id = owner_of_step[step_id]
        while node_id in parents:
            node_id = parents[node_id]
            owner = node_owner.get(node_id)
            if owner is not None and owner != step_id:
                return owner
        return None

    root = ProofTreeNode(node_id=ROOT_ID, statement=trace.theorem_statement)
    nodes: dict[str, ProofTreeNode] = {}
    for step in trace.steps:
        nodes[step.step_id] = ProofTreeNode(
            node_id=step.step_id, step_id=step.step_id, tactic_kind=step.tactic_kind
        )
    # trace.steps is in source-span order, so children arrive ordered.
    for step in trace.steps:
        parent_step = enclosing_step(step.step_id)
        parent = root if parent_step is None else nodes[parent_step]
        parent.children.append(nodes[step.step_id])

    for step in trace.steps:
        node = nodes[step.step_id]
        if node.children and step.tactic_kind not in intermediate_kinds:
            raise StructureError(
                f"step '{step.step_id}' ({step.tactic_kind}) owns a nested tactic block "
                f"but is not an intermediate-goal tactic {sorted(intermediate_kinds)}"
            )
    return root


def attach_explanations(tree: ProofTreeNode, explanations: Mapping[str, object]) -> ProofTreeNode:
    """Annotated copy of the tree; the root stays unannotated.

    Values may be StepExplanation objects or plain strings. Missing step ids
    raise MissingExplanation naming all of them.
    """
    missing = [n.node_id for n in tree.iter_steps() if n.step_id not in explanations]
    if missing:
        raise MissingExplanation(missing)

    def text_of(step_id: str) -> str:
        value = explanations[step_id]
        return value if isinstance(value, str) else value.text  # type: ignore[union-attr]

    def copy(node: ProofTreeNode) -> ProofTreeNode:
        return ProofTreeNode(
            node_id=node.node_id,
            step_id=node.step_id,
            statement=node.statement,
            tactic_kind=node.tactic_kind,
            children=[copy(child) for child in node.children],
            explanation=None if node.is_root else text_of(node.step_id),
        )

    return copy(tree)


# ---------------------------------------------------------------------------
# Debug exports


def tree_to_text(tree: ProofTreeNode) -> str:
    """Indented dump; byte-stable, used for fixture diffing."""
    lines: list[str] = []

    def walk(node: ProofTreeNode, depth: int) -> None:
        if node.is_root:
            lines.append(f"Root: {node.statement}")
        else:
            lines.append("  " * depth + f"{node.node_id} [{node.tactic_kind}]")
        for child in node.children:
            walk(child, depth + 1)

    walk(tree, 0)
    return "\n".join(lines) + "\n"


def tree_to_dot(tree: ProofTreeNode) -> str:
    lines = ["digraph proof {", "  node [shape=box];"]

    def quote(text: str) -> str:
        return text.replace("\\", "\\\\").replace('"', '\\"')

    for node in tree.iter_nodes():
        label = "Root" if node.is_root else f"{node.node_id} [{node.tactic_kind}]"
        lines.append(f'  "{quote(node.node_id)}" [label="{quote(label)}"];')
    for node in tree.iter_nodes():
        for child in node.children:
            lines.append(f'  "{quote(node.node_id)}" -> "{quote(child.node_id)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
