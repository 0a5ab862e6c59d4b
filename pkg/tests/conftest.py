from __future__ import annotations

import json
import pathlib

import pytest

from leanprose import (
    PremiseLibrary,
    TemplateCatalog,
    load_fewshot_pool,
    load_library,
    load_modules,
    load_statement_fewshots,
    load_trace,
)

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
PROMPTS = ROOT / "prompts"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def prompts_dir() -> pathlib.Path:
    return PROMPTS


@pytest.fixture()
def even_trace():
    return load_trace(FIXTURES / "even_add_even.trace")


@pytest.fixture()
def inf_trace():
    return load_trace(FIXTURES / "inf_pos_zero.trace")


@pytest.fixture()
def library() -> PremiseLibrary:
    modules = load_modules(FIXTURES / "modules.json")
    return load_library(FIXTURES / "premise_library.jsonl", modules)


@pytest.fixture(scope="session")
def catalog() -> TemplateCatalog:
    return TemplateCatalog.default()


@pytest.fixture(scope="session")
def pool():
    return load_fewshot_pool()


@pytest.fixture(scope="session")
def statement_fewshots():
    return load_statement_fewshots()


@pytest.fixture()
def even_explanations() -> dict[str, str]:
    return json.loads((FIXTURES / "even_add_even.steps.json").read_text("utf-8"))


@pytest.fixture()
def inf_explanations() -> dict[str, str]:
    return json.loads((FIXTURES / "inf_pos_zero.steps.json").read_text("utf-8"))
