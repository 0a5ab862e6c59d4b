"""Seeded random generators used as independent oracles in property tests.

The trace generator decides the intended nesting structure up front and
returns it alongside the trace, so tree-construction tests compare against
a structure that was never derived from the code under test. Generated
documents go through the real parser, exercising serialization round-trips
on every case.
"""

from __future__ import annotations

import json
import random

from leanprose import parse_trace, ProofTrace

LEAF_KINDS = ("rw", "exact", "simp", "apply", "intro", "norm_num")


def random_trace(rng: random.Random, max_steps: int = 30, max_depth: int = 3):
    """A valid random trace plus the intended parent map {step_id: parent}.

    Parent is None for top-level steps. Nesting happens only under `have`
    steps, to depth at most `max_depth`.
    """
    total = rng.randint(1, max_steps)
    counter = {"step": 0, "node": 0, "line": 3}
    steps: list[dict] = []
    parents: dict[str, str | None] = {}

    def new_step(kind: str, parent: str | None, depth: int) -> dict:
        counter["step"] += 1
        counter["line"] += 1
        sid = f"s{counter['step']}"
        parents[sid] = parent
        goals_before = [f"G{counter['step']}"]
        if kind == "have":
            goals_after = [f"H{counter['step']}", f"G{counter['step']}"]
        elif kind == "exact":
            goals_after = []
        else:
            goals_after = [f"G{counter['step']}'"]
        step = {
            "id": sid,
            "tactic": kind if kind != "rw" else "rw [h]",
            "kind": kind,
            "before": {"hyps": [["h", "x = y"]], "goals": goals_before},
            "after": {"hyps": [["h", "x = y"]], "goals": goals_after},
            "premises": [],
            "span": [[counter["line"], 2 + depth * 2], [counter["line"], 20]],
        }
        steps.append(step)
        return step

    def new_node(step_id: str | None, children: list[dict]) -> dict:
        counter["node"] += 1
        node = {
            "id": f"n{counter['node']}",
            "kind": "tactic" if step_id else "block",
            "children": children,
            "introduces": [],
            "mentions": [],
        }
        if step_id:
            node["step"] = step_id
        return node

    def gen_block(parent: str | None, depth: int, budget: int) -> tuple[list[dict], int]:
        nodes = []
        used = 0
        n_children = rng.randint(1, max(1, min(4, budget)))
        for _ in range(n_children):
            if used >= budget:
                break
            remaining = budget - used
            nest = depth < max_depth and remaining > 1 and rng.random() < 0.35
            if nest:
                step = new_step("have", parent, depth)
                used += 1
                child_nodes, child_used = gen_block(step["id"], depth + 1, remaining - 1)
                used += child_used
                nodes.append(new_node(step["id"], child_nodes))
            else:
                step = new_step(rng.choice(LEAF_KINDS), parent, depth)
                used += 1
                nodes.append(new_node(step["id"], []))
        return nodes, used

    top_nodes, _ = gen_block(None, 0, total)
    doc = {
        "theorem_name": "T",
        "theorem_statement": "∀ x, P x",
        "steps": steps,
        "premises": [],
        "ast": {
            "id": "n0",
            "kind": "theorem",
            "children": top_nodes,
            "introduces": [],
            "mentions": [],
        },
    }
    trace = parse_trace(json.dumps(doc, ensure_ascii=False))
    return trace, parents


def random_dag(rng: random.Random, max_nodes: int = 50):
    """Random acyclic import graph as {module: [imports]} (edges to lower ids)."""
    n = rng.randint(1, max_nodes)
    modules: dict[str, list[str]] = {}
    names = [f"M{i}" for i in range(n)]
    for i, name in enumerate(names):
        candidates = names[:i]
        k = rng.randint(0, min(4, len(candidates)))
        modules[name] = rng.sample(candidates, k)
    return modules


def longest_path_levels(modules: dict[str, list[str]]) -> dict[str, int]:
    """Oracle: Bellman-Ford-style relaxation instead of topological DP."""
    levels = {m: 0 for m in modules}
    for _ in range(len(modules)):
        changed = False
        for m, imports in modules.items():
            for i in imports:
                if i in levels and levels[m] < levels[i] + 1:
                    levels[m] = levels[i] + 1
                    changed = True
        if not changed:
            break
    return levels


def expected_tree_invariants(trace: ProofTrace, parents: dict[str, str | None], tree) -> None:
    """Assert coverage, intended parents, and source-order leaf traversal."""
    step_nodes = list(tree.iter_steps())
    ids = [node.node_id for node in step_nodes]
    assert sorted(ids) == sorted(s.step_id for s in trace.steps)
    assert len(set(ids)) == len(ids)

    # Intended parent relations hold exactly.
    def check(node, parent_id):
        for child in node.children:
            if not child.is_root:
                assert parents[child.node_id] == parent_id, (
                    f"{child.node_id}: expected parent {parents[child.node_id]}, got {parent_id}"
                )
            check(child, child.node_id)

    check(tree, None)

    # Pre-order visit of step nodes equals source order.
    source_order = [s.step_id for s in trace.steps]
    assert ids == source_order
