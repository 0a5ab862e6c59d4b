#!/usr/bin/env python3
"""Rebuild the checked-in trace fixtures from their authored literals.

The fixture content is hand-authored here; running the script re-emits it
through the canonical serializer so the on-disk bytes always match the
canonical format (the format-conversion tests diff against these bytes).
"""

from __future__ import annotations

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from leanprose.trace import (  # noqa: E402
    AstNode,
    PremiseRef,
    ProofState,
    ProofTrace,
    TacticStep,
    serialize_trace,
    validate_trace,
)
from leanprose.tree import build_tree, tree_to_text  # noqa: E402


def _state(hyps, goals):
    return ProofState(hypotheses=tuple(tuple(h) for h in hyps), goals=tuple(goals))


HYPS_AB = [["a", "ℕ"], ["b", "ℕ"]]
HYPS_FULL = [
    ["a", "ℕ"],
    ["b", "ℕ"],
    ["r1", "ℕ"],
    ["h1", "a = r1 + r1"],
    ["r2", "ℕ"],
    ["h2", "b = r2 + r2"],
]
HYPS_WITH_THIS = HYPS_FULL + [["this", "a + b = (r1 + r2) + (r1 + r2)"]]

EVEN_ADD_EVEN = ProofTrace(
    theorem_name="EvenAddEvenEqEven",
    theorem_statement="∀ (a : ℕ) (b : ℕ), Even a ∧ Even b → Even (a + b)",
    steps=(
        TacticStep(
            step_id="s1",
            tactic_text="intro ⟨⟨r1, h1⟩, ⟨r2, h2⟩⟩",
            tactic_kind="intro",
            state_before=_state(HYPS_AB, ["Even a ∧ Even b → Even (a + b)"]),
            state_after=_state(HYPS_FULL, ["Even (a + b)"]),
            premise_refs=(),
            source_span=((3, 2), (3, 31)),
        ),
        TacticStep(
            step_id="s2",
            tactic_text="have : a + b = (r1 + r2) + (r1 + r2)",
            tactic_kind="have",
            state_before=_state(HYPS_FULL, ["Even (a + b)"]),
            state_after=_state(HYPS_FULL, ["a + b = (r1 + r2) + (r1 + r2)", "Even (a + b)"]),
            premise_refs=(),
            source_span=((4, 2), (4, 40)),
        ),
        TacticStep(
            step_id="s3",
            tactic_text="rw [Nat.add_assoc, Nat.add_comm r2, ← Nat.add_assoc, ← Nat.add_assoc]",
            tactic_kind="rw",
            state_before=_state(HYPS_FULL, ["a + b = (r1 + r2) + (r1 + r2)", "Even (a + b)"]),
            state_after=_state(HYPS_FULL, ["a + b = r1 + r1 + r2 + r2", "Even (a + b)"]),
            premise_refs=("Nat.add_assoc", "Nat.add_comm"),
            source_span=((5, 4), (6, 26)),
        ),
        TacticStep(
            step_id="s4",
            tactic_text="rw [h1, h2]",
            tactic_kind="rw",
            state_before=_state(HYPS_FULL, ["a + b = r1 + r1 + r2 + r2", "Even (a + b)"]),
            state_after=_state(
                HYPS_FULL, ["r1 + r1 + (r2 + r2) = r1 + r1 + r2 + r2", "Even (a + b)"]
            ),
            premise_refs=(),
            source_span=((7, 4), (7, 15)),
        ),
        TacticStep(
            step_id="s5",
            tactic_text="rw [← Nat.add_assoc]",
            tactic_kind="rw",
            state_before=_state(
                HYPS_FULL, ["r1 + r1 + (r2 + r2) = r1 + r1 + r2 + r2", "Even (a + b)"]
            ),
            state_after=_state(HYPS_FULL, ["Even (a + b)"]),
            premise_refs=("Nat.add_assoc",),
            source_span=((8, 4), (8, 24)),
        ),
        TacticStep(
            step_id="s6",
            tactic_text="exact ⟨(r1 + r2), this⟩",
            tactic_kind="exact",
            state_before=_state(HYPS_WITH_THIS, ["Even (a + b)"]),
            # Closed states carry no context: the extraction side prints
            # them as a bare "no goals".
            state_after=_state([], []),
            premise_refs=(),
            source_span=((9, 2), (9, 26)),
        ),
    ),
    premises=(
        PremiseRef(
            name="Nat.add_assoc",
            statement_type="∀ (n m k : ℕ), n + m + k = n + (m + k)",
            defining_module="Init.Data.Nat.Basic",
        ),
        PremiseRef(
            name="Nat.add_comm",
            statement_type="∀ (n m : ℕ), n + m = m + n",
            defining_module="Init.Data.Nat.Basic",
        ),
    ),
    ast_root="ast0",
    ast_nodes={
        "ast0": AstNode(
            node_id="ast0",
            kind="theorem",
            children=("ast1", "ast2", "ast6"),
            introduces=("EvenAddEvenEqEven",),
            mentions=("Even",),
        ),
        "ast1": AstNode(
            node_id="ast1",
            kind="tactic",
            owning_step="s1",
            introduces=("r1", "h1", "r2", "h2"),
        ),
        "ast2": AstNode(
            node_id="ast2",
            kind="tactic",
            children=("ast3", "ast4", "ast5"),
            owning_step="s2",
            introduces=("this",),
        ),
        "ast3": AstNode(
            node_id="ast3",
            kind="tactic",
            owning_step="s3",
            mentions=("Nat.add_assoc", "Nat.add_comm", "r2"),
        ),
        "ast4": AstNode(node_id="ast4", kind="tactic", owning_step="s4", mentions=("h1", "h2")),
        "ast5": AstNode(node_id="ast5", kind="tactic", owning_step="s5", mentions=("Nat.add_assoc",)),
        "ast6": AstNode(
            node_id="ast6", kind="tactic", owning_step="s6", mentions=("r1", "r2", "this")
        ),
    },
)


P_SET = "{x : ℝ | 0 < x}"
INF_HYPS = [["P", f"Set ℝ := {P_SET}"]]

INF_POS_ZERO = ProofTrace(
    theorem_name="sInf_pos_eq_zero",
    theorem_statement=f"sInf {P_SET} = 0",
    steps=(
        TacticStep(
            step_id="s1",
            tactic_text=f"have hne : Set.Nonempty {P_SET}",
            tactic_kind="have",
            state_before=_state(INF_HYPS, [f"sInf {P_SET} = 0"]),
            state_after=_state(INF_HYPS, [f"Set.Nonempty {P_SET}", f"sInf {P_SET} = 0"]),
            premise_refs=("Set.Nonempty",),
            source_span=((3, 2), (3, 38)),
        ),
        TacticStep(
            step_id="s2",
            tactic_text="exact ⟨1, zero_lt_one⟩",
            tactic_kind="exact",
            state_before=_state(INF_HYPS, [f"Set.Nonempty {P_SET}", f"sInf {P_SET} = 0"]),
            state_after=_state(INF_HYPS, [f"sInf {P_SET} = 0"]),
            premise_refs=("zero_lt_one",),
            source_span=((4, 4), (4, 26)),
        ),
        TacticStep(
            step_id="s3",
            tactic_text=f"have hlb : ∀ a ∈ {P_SET}, 0 ≤ a",
            tactic_kind="have",
            state_before=_state(INF_HYPS, [f"sInf {P_SET} = 0"]),
            state_after=_state(INF_HYPS, [f"∀ a ∈ {P_SET}, 0 ≤ a", f"sInf {P_SET} = 0"]),
            premise_refs=(),
            source_span=((5, 2), (5, 40)),
        ),
        TacticStep(
            step_id="s4",
            tactic_text="intro a ha",
            tactic_kind="intro",
            state_before=_state(INF_HYPS, [f"∀ a ∈ {P_SET}, 0 ≤ a", f"sInf {P_SET} = 0"]),
            state_after=_state(
                INF_HYPS + [["a", "ℝ"], ["ha", f"a ∈ {P_SET}"]],
                ["0 ≤ a", f"sInf {P_SET} = 0"],
            ),
            premise_refs=(),
            source_span=((6, 4), (6, 14)),
        ),
        TacticStep(
            step_id="s5",
            tactic_text="exact le_of_lt ha",
            tactic_kind="exact",
            state_before=_state(
                INF_HYPS + [["a", "ℝ"], ["ha", f"a ∈ {P_SET}"]],
                ["0 ≤ a", f"sInf {P_SET} = 0"],
            ),
            state_after=_state(
                INF_HYPS + [["a", "ℝ"], ["ha", f"a ∈ {P_SET}"]], [f"sInf {P_SET} = 0"]
            ),
            premise_refs=("le_of_lt",),
            source_span=((7, 4), (7, 21)),
        ),
        TacticStep(
            step_id="s6",
            tactic_text=f"have hle : sInf {P_SET} ≤ 0",
            tactic_kind="have",
            state_before=_state(INF_HYPS, [f"sInf {P_SET} = 0"]),
            state_after=_state(INF_HYPS, [f"sInf {P_SET} ≤ 0", f"sInf {P_SET} = 0"]),
            premise_refs=(),
            source_span=((8, 2), (8, 34)),
        ),
        TacticStep(
            step_id="s7",
            tactic_text="by_contra hpos",
            tactic_kind="by_contra",
            state_before=_state(INF_HYPS, [f"sInf {P_SET} ≤ 0", f"sInf {P_SET} = 0"]),
            state_after=_state(
                INF_HYPS + [["hpos", f"¬sInf {P_SET} ≤ 0"]], ["False", f"sInf {P_SET} = 0"]
            ),
            premise_refs=(),
            source_span=((9, 4), (9, 18)),
        ),
        TacticStep(
            step_id="s8",
            tactic_text=f"have hmem : sInf {P_SET} / 2 ∈ {P_SET}",
            tactic_kind="have",
            state_before=_state(
                INF_HYPS + [["hpos", f"¬sInf {P_SET} ≤ 0"]], ["False", f"sInf {P_SET} = 0"]
            ),
            state_after=_state(
                INF_HYPS + [["hpos", f"¬sInf {P_SET} ≤ 0"]],
                [f"sInf {P_SET} / 2 ∈ {P_SET}", "False", f"sInf {P_SET} = 0"],
            ),
            premise_refs=(),
            source_span=((10, 4), (10, 44)),
        ),
        TacticStep(
            step_id="s9",
            tactic_text="exact half_pos (lt_of_not_le hpos)",
            tactic_kind="exact",
            state_before=_state(
                INF_HYPS + [["hpos", f"¬sInf {P_SET} ≤ 0"]],
                [f"sInf {P_SET} / 2 ∈ {P_SET}", "False", f"sInf {P_SET} = 0"],
            ),
            state_after=_state(
                INF_HYPS + [["hpos", f"¬sInf {P_SET} ≤ 0"]], ["False", f"sInf {P_SET} = 0"]
            ),
            premise_refs=("half_pos", "lt_of_not_le"),
            source_span=((11, 6), (11, 40)),
        ),
        TacticStep(
            step_id="s10",
            tactic_text="exact absurd (csInf_le ⟨0, fun a ha => le_of_lt ha⟩ hmem) (not_le.mpr (half_lt_self (lt_of_not_le hpos)))",
            tactic_kind="exact",
            state_before=_state(
                INF_HYPS
                + [
                    ["hpos", f"¬sInf {P_SET} ≤ 0"],
                    ["hmem", f"sInf {P_SET} / 2 ∈ {P_SET}"],
                ],
                ["False", f"sInf {P_SET} = 0"],
            ),
            state_after=_state(
                INF_HYPS
                + [
                    ["hpos", f"¬sInf {P_SET} ≤ 0"],
                    ["hmem", f"sInf {P_SET} / 2 ∈ {P_SET}"],
                ],
                [f"sInf {P_SET} = 0"],
            ),
            premise_refs=("csInf_le", "half_lt_self", "lt_of_not_le"),
            source_span=((12, 6), (12, 66)),
        ),
        TacticStep(
            step_id="s11",
            tactic_text="exact le_antisymm hle (le_csInf hne hlb)",
            tactic_kind="exact",
            state_before=_state(
                INF_HYPS
                + [
                    ["hne", f"Set.Nonempty {P_SET}"],
                    ["hlb", f"∀ a ∈ {P_SET}, 0 ≤ a"],
                    ["hle", f"sInf {P_SET} ≤ 0"],
                ],
                [f"sInf {P_SET} = 0"],
            ),
            state_after=_state([], []),
            premise_refs=("le_antisymm", "le_csInf"),
            source_span=((13, 2), (13, 44)),
        ),
    ),
    premises=(
        PremiseRef("Set.Nonempty", "Set α → Prop", "Mathlib.Data.Set.Basic"),
        PremiseRef("zero_lt_one", "0 < 1", "Mathlib.Order.Basic"),
        PremiseRef("le_of_lt", "a < b → a ≤ b", "Mathlib.Order.Basic"),
        PremiseRef("half_pos", "0 < a → 0 < a / 2", "Mathlib.Data.Real.Basic"),
        PremiseRef("lt_of_not_le", "¬a ≤ b → b < a", "Mathlib.Order.Basic"),
        PremiseRef(
            "csInf_le",
            "BddBelow s → a ∈ s → sInf s ≤ a",
            "Mathlib.Order.ConditionallyCompleteLattice.Basic",
        ),
        PremiseRef("half_lt_self", "0 < a → a / 2 < a", "Mathlib.Data.Real.Basic"),
        PremiseRef(
            "le_csInf",
            "Set.Nonempty s → (∀ b ∈ s, a ≤ b) → a ≤ sInf s",
            "Mathlib.Order.ConditionallyCompleteLattice.Basic",
        ),
        PremiseRef("le_antisymm", "a ≤ b → b ≤ a → a = b", "Mathlib.Order.Basic"),
    ),
    ast_root="n0",
    ast_nodes={
        "n0": AstNode("n0", "theorem", children=("n1", "n3", "n6", "n11"), introduces=("sInf_pos_eq_zero",), mentions=("sInf",)),
        "n1": AstNode("n1", "tactic", children=("n2",), owning_step="s1", introduces=("hne",)),
        "n2": AstNode("n2", "tactic", owning_step="s2", mentions=("zero_lt_one",)),
        "n3": AstNode("n3", "tactic", children=("n4", "n5"), owning_step="s3", introduces=("hlb",)),
        "n4": AstNode("n4", "tactic", owning_step="s4", introduces=("a", "ha")),
        "n5": AstNode("n5", "tactic", owning_step="s5", mentions=("le_of_lt", "ha")),
        "n6": AstNode("n6", "tactic", children=("n7", "n8", "n10"), owning_step="s6", introduces=("hle",)),
        "n7": AstNode("n7", "tactic", owning_step="s7", introduces=("hpos",)),
        "n8": AstNode("n8", "tactic", children=("n9",), owning_step="s8", introduces=("hmem",)),
        "n9": AstNode("n9", "tactic", owning_step="s9", mentions=("half_pos", "lt_of_not_le", "hpos")),
        "n10": AstNode("n10", "tactic", owning_step="s10", mentions=("csInf_le", "half_lt_self", "hmem", "hpos")),
        "n11": AstNode("n11", "tactic", owning_step="s11", mentions=("le_antisymm", "le_csInf", "hne", "hlb", "hle")),
    },
)


def main() -> None:
    fixtures = ROOT / "fixtures"
    fixtures.mkdir(exist_ok=True)
    for name, trace in (("even_add_even", EVEN_ADD_EVEN), ("inf_pos_zero", INF_POS_ZERO)):
        validate_trace(trace, name)
        (fixtures / f"{name}.trace").write_text(serialize_trace(trace), encoding="utf-8")
        (fixtures / f"{name}.tree.txt").write_text(tree_to_text(build_tree(trace)), encoding="utf-8")
        print(f"wrote {name}.trace / {name}.tree.txt")


if __name__ == "__main__":
    main()
