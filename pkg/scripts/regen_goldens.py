#!/usr/bin/env python3
"""Regenerate the normative prompt goldens under prompts/.

Run only after an intentional prompt-assembly change; the golden bytes are
the contract that keeps assembled prompts stable across refactors.
"""

from __future__ import annotations

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

import json  # noqa: E402

from leanprose import (  # noqa: E402
    TemplateCatalog,
    attach_explanations,
    build_step_request,
    build_tree,
    load_fewshot_pool,
    load_library,
    load_statement_fewshots,
    load_trace,
    request_to_text,
    statement_premises,
)
from leanprose.informalize import assemble_statement_prompt  # noqa: E402
from leanprose.summarize import assemble_summarize_prompt  # noqa: E402

FIXTURES = ROOT / "fixtures"
PROMPTS = ROOT / "prompts"

STATEMENT_NL = "The sum of two even numbers is an even number."


def main() -> None:
    PROMPTS.mkdir(exist_ok=True)
    trace = load_trace(FIXTURES / "even_add_even.trace")
    library = load_library(FIXTURES / "premise_library.jsonl")
    catalog = TemplateCatalog.default()
    pool = load_fewshot_pool()

    request, template = build_step_request(trace.step("s3"), trace, library, catalog, pool)
    assert template.template_id == "rw.goal.theorems", template.template_id
    (PROMPTS / "rw_theorems.golden").write_text(request_to_text(request), encoding="utf-8")

    explanations = json.loads((FIXTURES / "even_add_even.steps.json").read_text("utf-8"))
    annotated = attach_explanations(build_tree(trace), explanations)
    have_node = annotated.children[1]
    child_texts = [child.explanation for child in have_node.children]
    request = assemble_summarize_prompt(have_node, child_texts, STATEMENT_NL)
    (PROMPTS / "summarize_have.golden").write_text(request_to_text(request), encoding="utf-8")

    fewshots = load_statement_fewshots()
    premises = statement_premises(trace.theorem_statement, library)
    request = assemble_statement_prompt(trace.theorem_statement, premises, fewshots)
    (PROMPTS / "statement.golden").write_text(request_to_text(request), encoding="utf-8")

    for name in ("rw_theorems", "summarize_have", "statement"):
        print(f"wrote prompts/{name}.golden")


if __name__ == "__main__":
    main()
