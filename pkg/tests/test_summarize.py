from __future__ import annotations

import re

import pytest

from leanprose import (
    BackendError,
    MissingExplanation,
    MockBackend,
    PromptBudgetError,
    attach_explanations,
    build_tree,
    internal_node_count,
    request_to_text,
    summarize_tree,
)
from leanprose.summarize import assemble_summarize_prompt

STATEMENT = "The sum of two even numbers is an even number."


@pytest.fixture()
def even_annotated(even_trace, even_explanations):
    return attach_explanations(build_tree(even_trace), even_explanations)


@pytest.fixture()
def inf_annotated(inf_trace, inf_explanations):
    return attach_explanations(build_tree(inf_trace), inf_explanations)


def counting_mock():
    counter = {"n": 0}

    def reply(request):
        counter["n"] += 1
        return f"(subproof {counter['n']})"

    return MockBackend(reply_fn=reply)


def test_even_add_even_recursive_two_calls_child_before_parent(even_annotated):
    mock = counting_mock()
    proof = summarize_tree(even_annotated, STATEMENT, mock, "recursive")
    assert len(mock.calls) == 2
    assert internal_node_count(even_annotated) == 2
    # First call is the have subtree (its own explanation is the goal line),
    # second is the root merge.
    first_user = mock.calls[0].messages[-1].content
    assert "**Intermediate Goal**:" in first_user
    assert "a + b = (r1 + r2) + (r1 + r2)" in first_user
    second_user = mock.calls[1].messages[-1].content
    assert "**Intermediate Goal**:" not in second_user
    assert "(subproof 1)" in second_user  # child sub-proof folded into the root prompt
    assert proof == "(subproof 2)"


def test_root_only_tree_single_call(even_annotated):
    from leanprose.tree import ProofTreeNode

    root = ProofTreeNode(node_id="root", statement="P")
    mock = MockBackend(reply_fn=lambda r: "The statement holds trivially.")
    proof = summarize_tree(root, "P holds.", mock, "recursive")
    assert len(mock.calls) == 1
    assert proof == "The statement holds trivially."


def test_have_prompt_matches_golden(even_annotated, prompts_dir):
    have_node = even_annotated.children[1]
    child_texts = [child.explanation for child in have_node.children]
    request = assemble_summarize_prompt(have_node, child_texts, STATEMENT)
    assert request.temperature == 1.0
    golden = (prompts_dir / "summarize_have.golden").read_text("utf-8")
    assert request_to_text(request) == golden


def test_root_children_numbered_in_order(even_annotated):
    mock = counting_mock()
    summarize_tree(even_annotated, STATEMENT, mock, "recursive")
    root_user = mock.calls[-1].messages[-1].content
    numbered = re.findall(r"^(\d+)\. ", root_user, flags=re.M)
    assert numbered == ["1", "2", "3"]  # intro, have sub-proof, exact


def test_internal_node_prompt_requires_children(even_annotated):
    have_node = even_annotated.children[1]
    with pytest.raises(ValueError):
        assemble_summarize_prompt(have_node, [], STATEMENT)


def test_flat_mode_lists_all_six_steps(even_annotated, even_explanations):
    mock = counting_mock()
    summarize_tree(even_annotated, STATEMENT, mock, "flat")
    assert len(mock.calls) == 1
    user = mock.calls[0].messages[-1].content
    numbered = re.findall(r"^(\d+)\. ", user, flags=re.M)
    assert numbered == [str(i) for i in range(1, 7)]
    for text in even_explanations.values():
        assert text in user


def test_flat_recursive_leaf_parity(even_annotated, even_explanations):
    recursive_mock = counting_mock()
    summarize_tree(even_annotated, STATEMENT, recursive_mock, "recursive")
    flat_mock = counting_mock()
    summarize_tree(even_annotated, STATEMENT, flat_mock, "flat")
    recursive_texts = "\n".join(c.messages[-1].content for c in recursive_mock.calls)
    flat_text = flat_mock.calls[0].messages[-1].content
    for explanation in even_explanations.values():
        assert explanation in recursive_texts
        assert explanation in flat_text


def test_infimum_root_prompt_contains_three_subproofs(inf_annotated):
    mock = counting_mock()
    summarize_tree(inf_annotated, "The infimum of the set of positive reals is zero.", mock, "recursive")
    # Internal nodes: s1, s3, s6, s8 and the root.
    assert len(mock.calls) == 5
    assert internal_node_count(inf_annotated) == 5
    root_user = mock.calls[-1].messages[-1].content
    # The three top-level have sub-proofs are folded into the root prompt;
    # the nested s8 sub-proof is not re-included at the root.
    assert "(subproof 1)" in root_user
    assert "(subproof 2)" in root_user
    assert "(subproof 4)" in root_user
    assert "(subproof 3)" not in root_user


def test_child_before_parent_everywhere(inf_annotated):
    order: list[str] = []

    def reply(request):
        order.append(request.messages[-1].content)
        return f"(subproof {len(order)})"

    mock = MockBackend(reply_fn=reply)
    summarize_tree(inf_annotated, "statement", mock, "recursive")
    # The s8 prompt must be issued before the s6 prompt that folds it in.
    s8_index = next(i for i, text in enumerate(order) if "half of the infimum belongs" in text.split("**Step Explanations**")[0])
    s6_index = next(i for i, text in enumerate(order) if "(subproof 3)" in text)
    assert s8_index < s6_index


def test_unannotated_tree_raises(even_trace):
    bare = build_tree(even_trace)
    with pytest.raises(MissingExplanation):
        summarize_tree(bare, STATEMENT, MockBackend(echo=True), "recursive")


def test_unknown_mode_rejected(even_annotated):
    with pytest.raises(ValueError, match="mode"):
        summarize_tree(even_annotated, STATEMENT, MockBackend(echo=True), "sideways")


def test_budget_overflow_errors_not_truncates(even_annotated):
    with pytest.raises(PromptBudgetError, match="budget"):
        summarize_tree(
            even_annotated, STATEMENT, MockBackend(echo=True), "recursive", max_child_chars=50
        )


def test_empty_summary_is_malformed(even_annotated):
    mock = MockBackend(reply_fn=lambda r: " ")
    with pytest.raises(BackendError) as exc_info:
        summarize_tree(even_annotated, STATEMENT, mock, "recursive")
    assert exc_info.value.kind == "malformed_response"


def test_subproofs_emitted(even_annotated):
    collected = []
    mock = counting_mock()
    summarize_tree(even_annotated, STATEMENT, mock, "recursive", on_subproof=collected.append)
    assert [sp.subtree_root for sp in collected] == ["s2", "root"]
    assert collected[0].body == "(subproof 1)"
    assert collected[1].goal_text == STATEMENT


def test_concurrent_siblings_same_result(inf_annotated):
    sequential = summarize_tree(inf_annotated, "statement", MockBackend(echo=True), "recursive")
    concurrent = summarize_tree(
        inf_annotated, "statement", MockBackend(echo=True), "recursive",
        concurrent_siblings=True, max_workers=4,
    )
    assert sequential == concurrent


def test_temperature_default_is_one(even_annotated):
    mock = counting_mock()
    summarize_tree(even_annotated, STATEMENT, mock, "recursive")
    assert all(call.temperature == 1.0 for call in mock.calls)
