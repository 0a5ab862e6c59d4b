from __future__ import annotations

import json
import random

import pytest

from leanprose import (
    CatalogError,
    MissingSlot,
    SlotSpec,
    Template,
    TemplateCatalog,
    UsageFacts,
    derive_usage_facts,
    render_skeleton,
    select_template,
)


def facts_for(trace, step_id):
    return derive_usage_facts(trace.step(step_id), trace)


def test_rw_with_theorems_rewrites_goal(even_trace):
    facts = facts_for(even_trace, "s3")
    assert facts.uses_theorems is True
    assert facts.uses_hypotheses is False  # r2 is a typed variable, not a fact
    assert facts.rewrites_goal is True
    assert facts.rewrites_hypothesis is False
    assert facts.closes_goal is False


def test_rw_with_hypotheses_rewrites_goal(even_trace):
    facts = facts_for(even_trace, "s4")
    assert facts.uses_theorems is False
    assert facts.uses_hypotheses is True
    assert facts.rewrites_goal is True


def test_have_introduces_goal(even_trace):
    facts = facts_for(even_trace, "s2")
    assert facts.introduces_goal is True
    assert facts.closes_goal is False
    assert facts.rewrites_goal is False


def test_closing_rw_detected(even_trace):
    facts = facts_for(even_trace, "s5")
    assert facts.closes_goal is True
    assert facts.uses_theorems is True


def test_exact_uses_propositional_hypothesis(even_trace):
    facts = facts_for(even_trace, "s6")
    assert facts.uses_hypotheses is True  # `this` carries an equation
    assert facts.closes_goal is True
    assert facts.uses_theorems is False


def test_step_must_belong_to_trace(even_trace, inf_trace):
    with pytest.raises(ValueError):
        derive_usage_facts(inf_trace.step("s7"), even_trace)


def test_even_add_even_rw_template_selection(even_trace, catalog):
    line5 = select_template(catalog, "rw", facts_for(even_trace, "s3"))
    assert line5.body == "By using [theorems], [goalsBefore] becomes [goalsAfter]."
    line7 = select_template(catalog, "rw", facts_for(even_trace, "s4"))
    assert line7.body == "By using [assumptions], [goalsBefore] becomes [goalsAfter]."


def test_unknown_kind_falls_back(catalog):
    template = select_template(catalog, "frobnicate", UsageFacts())
    assert template.tactic_kind == "*"
    assert template.body == "This step applies [tacticText], transforming [goalsBefore] into [goalsAfter]."


def test_selection_stable_under_catalog_reordering(even_trace, catalog):
    facts = facts_for(even_trace, "s3")
    expected = select_template(catalog, "rw", facts).template_id
    rng = random.Random(5)
    templates = list(catalog.templates)
    for _ in range(10):
        rng.shuffle(templates)
        shuffled = TemplateCatalog(templates, catalog.slots.values())
        assert select_template(shuffled, "rw", facts).template_id == expected


def test_specificity_dominance(catalog, even_trace):
    for step in even_trace.steps:
        facts = derive_usage_facts(step, even_trace)
        chosen = select_template(catalog, step.tactic_kind, facts)
        rivals = [
            t for t in catalog.templates
            if t.tactic_kind == step.tactic_kind and t.matches(facts)
        ]
        assert all(chosen.specificity >= rival.specificity for rival in rivals)


def test_tie_breaks_on_lowest_template_id():
    slots = [SlotSpec("goalsBefore", "x"), SlotSpec("tacticText", "y")]
    templates = [
        Template("zz.second", "foo", (("closes_goal", False),), "B [goalsBefore]"),
        Template("aa.first", "foo", (("rewrites_goal", False),), "A [goalsBefore]"),
        Template("star", "*", (), "F [tacticText]"),
    ]
    catalog = TemplateCatalog(templates, slots)
    chosen = select_template(catalog, "foo", UsageFacts())
    assert chosen.template_id == "aa.first"


def test_missing_fallback_raises():
    slots = [SlotSpec("goalsBefore", "x")]
    templates = [Template("only.rw", "rw", (), "B [goalsBefore]")]
    catalog = TemplateCatalog(templates, slots, require_fallback=False)
    with pytest.raises(CatalogError, match="fallback"):
        select_template(catalog, "frobnicate", UsageFacts())


def test_render_skeleton_substitutes():
    template = Template("t", "rw", (), "By using [theorems], [goalsBefore] becomes [goalsAfter].")
    text = render_skeleton(
        template,
        {
            "theorems": "the associativity of addition",
            "goalsBefore": "the old goal",
            "goalsAfter": "the new goal",
        },
    )
    assert text == "By using the associativity of addition, the old goal becomes the new goal."


def test_render_skeleton_zero_slots_unchanged():
    template = Template("t", "calc", (), "Nothing to fill here.")
    assert render_skeleton(template, {}) == "Nothing to fill here."


def test_render_skeleton_missing_slot():
    template = Template("t", "rw", (), "By using [theorems], [goalsBefore] becomes [goalsAfter].")
    with pytest.raises(MissingSlot, match="goalsAfter"):
        render_skeleton(template, {"theorems": "x", "goalsBefore": "y"})


def test_catalog_lint_unknown_slot(tmp_path):
    doc = {
        "slots": [{"name": "goalsBefore", "description": "x"}],
        "templates": [
            {"id": "a", "tactic": "*", "guard": {}, "body": "uses [nonexistent]"},
        ],
    }
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(CatalogError, match="unknown slot"):
        TemplateCatalog.load(path)


def test_catalog_lint_unknown_guard_fact(tmp_path):
    doc = {
        "slots": [{"name": "tacticText", "description": "x"}],
        "templates": [
            {"id": "a", "tactic": "*", "guard": {}, "body": "[tacticText]"},
            {"id": "b", "tactic": "rw", "guard": {"made_up": True}, "body": "[tacticText]"},
        ],
    }
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(CatalogError, match="unknown fact"):
        TemplateCatalog.load(path)


def test_catalog_requires_fallback(tmp_path):
    doc = {
        "slots": [{"name": "tacticText", "description": "x"}],
        "templates": [{"id": "a", "tactic": "rw", "guard": {}, "body": "[tacticText]"}],
    }
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(CatalogError, match="fallback"):
        TemplateCatalog.load(path)


def test_default_catalog_covers_required_kinds(catalog):
    kinds = {t.tactic_kind for t in catalog.templates}
    required = {
        "intro", "have", "rw", "exact", "apply", "cases'", "rcases", "by_contra",
        "calc", "simp", "field_simp", "refine", "suffices", "set", "obtain", "*",
    }
    assert required <= kinds
    rw_variants = [t for t in catalog.templates if t.tactic_kind == "rw"]
    assert len(rw_variants) >= 6
