"""Recursive, structure-aware summarization of annotated proof trees.

Recursive mode walks the tree post-order: each intermediate goal's subtree
is collapsed into a sub-proof first, and the root call merges the top-level
texts into the final proof, so no parent prompt is issued before all of its
children's texts exist. Flat mode is the structure-blind baseline: one
prompt listing every step explanation in source order.

Child texts over the per-prompt character budget raise an error; silent
truncation would cause exactly the information loss the flat baseline
suffers from.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .backend import Backend, ChatMessage, ChatRequest, DEFAULT_MODEL, SUMMARIZE_TEMPERATURE
from .errors import BackendError, MissingExplanation, PromptBudgetError
from .tree import ProofTreeNode

DEFAULT_CHILD_TEXT_BUDGET = 6000

SUMMARIZE_SYSTEM_PROMPT = """You are an expert mathematician writing proofs for human readers.
Combine the given proof step explanations into a single piece of flowing mathematical prose.
# Steps
1. Read the theorem statement and, if present, the intermediate goal this passage must establish.
2. Read the numbered step explanations in order; they are the complete argument for this passage.
# Notes
- Preserve the logical order of the steps.
- Do not invent reasoning that is not present in the step explanations.
- Do not use formal language syntax; write mathematical prose, using TeX for formulas where helpful.
- Output only the proof text."""


@dataclass(frozen=True)
class SubProof:
    """Natural-language proof of one intermediate goal (or the whole proof)."""

    subtree_root: str
    goal_text: str
    body: str


def assemble_summarize_prompt(
    node: ProofTreeNode,
    child_texts: Sequence[str],
    statement_nl: str,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = SUMMARIZE_TEMPERATURE,
) -> ChatRequest:
    """Deterministic prompt for collapsing one node's children.

    Internal step nodes must bring at least one child text; only the root
    may legitimately have none (single-statement proofs).
    """
    if not node.is_root and not child_texts:
        raise ValueError(f"internal node '{node.node_id}' has no child texts")
    lines: list[str] = ["**Theorem**:", statement_nl, ""]
    if not node.is_root:
        lines.append("**Intermediate Goal**:")
        lines.append(node.explanation or "")
        lines.append("")
    if child_texts:
        lines.append("**Step Explanations**:")
        for i, text in enumerate(child_texts, 1):
            lines.append(f"{i}. {text}")
        lines.append("")
    lines.append("**Proof of the intermediate goal**:" if not node.is_root else "**Proof**:")
    return ChatRequest(
        model=model,
        temperature=temperature,
        messages=(
            ChatMessage("system", SUMMARIZE_SYSTEM_PROMPT),
            ChatMessage("user", "\n".join(lines)),
        ),
    )


def _check_annotated(tree: ProofTreeNode) -> None:
    missing = [node.node_id for node in tree.iter_steps() if node.explanation is None]
    if missing:
        raise MissingExplanation(missing)


def _check_budget(node_id: str, child_texts: Sequence[str], budget: int) -> None:
    size = sum(len(text) for text in child_texts)
    if size > budget:
        raise PromptBudgetError(
            f"node '{node_id}': child texts total {size} characters, over the {budget} budget"
        )


def summarize_tree(
    tree: ProofTreeNode,
    statement_nl: str,
    backend: Backend,
    mode: str = "recursive",
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = SUMMARIZE_TEMPERATURE,
    max_child_chars: int = DEFAULT_CHILD_TEXT_BUDGET,
    on_subproof: Callable[[SubProof], None] | None = None,
    concurrent_siblings: bool = False,
    max_workers: int = 4,
) -> str:
    """Collapse a fully annotated tree into one natural-language proof."""
    if mode not in ("recursive", "flat"):
        raise ValueError(f"unknown summarization mode '{mode}'")
    _check_annotated(tree)

    def call(node: ProofTreeNode, child_texts: list[str]) -> str:
        _check_budget(node.node_id, child_texts, max_child_chars)
        request = assemble_summarize_prompt(
            node, child_texts, statement_nl, model=model, temperature=temperature
        )
        try:
            body = backend.complete(request)
        except BackendError as exc:
            raise BackendError(exc.kind, f"summarizing node {node.node_id}: {exc}") from exc
        if not body.strip():
            raise BackendError("malformed_response", f"empty summary for node {node.node_id}")
        if on_subproof is not None:
            on_subproof(
                SubProof(
                    subtree_root=node.node_id,
                    goal_text=statement_nl if node.is_root else (node.explanation or ""),
                    body=body,
                )
            )
        return body

    if mode == "flat":
        texts = [node.explanation or "" for node in tree.iter_steps()]
        return call(tree, texts)

    def visit(node: ProofTreeNode) -> str:
        # Step leaves contribute their explanation directly (no call); the
        # root always issues a call, even for step-less proofs.
        if not node.children and not node.is_root:
            return node.explanation or ""
        if concurrent_siblings and len(node.children) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                child_texts = list(pool.map(visit, node.children))
        else:
            child_texts = [visit(child) for child in node.children]
        return call(node, child_texts)

    return visit(tree)


def internal_node_count(tree: ProofTreeNode) -> int:
    """Number of backend calls recursive mode will make (root included)."""
    return 1 + sum(1 for node in tree.iter_steps() if node.children)
