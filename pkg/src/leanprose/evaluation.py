"""Measurement machinery over recorded human judgments.

Judgments are input data, never computed: this module derives labels from
recorded flags, tallies them per configuration, scores key-point coverage,
and runs the paired discordant-count significance test. The only automatic
check is `autoflag_formal_syntax`, an assistive pre-annotation for the one
criterion that is mechanically visible (formal syntax left in output).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from typing import Iterable, Sequence

from .errors import DegenerateTable, EmptyConfig, EmptyCriteria, ParseError, ValidationError


class StepLabel(str, Enum):
    UNTRANSLATED = "UntranslatedExpression"
    MISINFORMATION = "Misinformation"
    INSUFFICIENT = "InsufficientInformation"
    UNNECESSARY = "UnnecessaryMention"
    CORRECT = "Correct"


LABEL_ORDER = (
    StepLabel.CORRECT,
    StepLabel.MISINFORMATION,
    StepLabel.INSUFFICIENT,
    StepLabel.UNNECESSARY,
    StepLabel.UNTRANSLATED,
)


@dataclass(frozen=True)
class StepFlags:
    formal_syntax: bool = False
    misinformation: bool = False
    insufficient: bool = False
    unnecessary: bool = False


@dataclass(frozen=True)
class StepJudgment:
    step_id: str
    config_id: str
    flags: StepFlags


def classify_step(flags: StepFlags) -> StepLabel:
    """First-true-wins, ordered by how badly each defect poisons summaries."""
    if flags.formal_syntax:
        return StepLabel.UNTRANSLATED
    if flags.misinformation:
        return StepLabel.MISINFORMATION
    if flags.insufficient:
        return StepLabel.INSUFFICIENT
    if flags.unnecessary:
        return StepLabel.UNNECESSARY
    return StepLabel.CORRECT


def _round_half_up(value: float, places: int) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass
class TallyResult:
    config_id: str
    total: int
    counts: dict[StepLabel, int]

    @property
    def fractions(self) -> dict[StepLabel, float]:
        return {label: self.counts[label] / self.total for label in LABEL_ORDER}

    @property
    def percentages(self) -> dict[StepLabel, float]:
        """Display percentages, 2 d.p. half-up."""
        return {
            label: _round_half_up(100.0 * self.counts[label] / self.total, 2)
            for label in LABEL_ORDER
        }

    def to_jsonable(self) -> dict:
        return {
            "config_id": self.config_id,
            "total": self.total,
            "counts": {label.value: self.counts[label] for label in LABEL_ORDER},
            "fractions": {label.value: self.fractions[label] for label in LABEL_ORDER},
            "percentages": {label.value: self.percentages[label] for label in LABEL_ORDER},
        }

    def format_text(self) -> str:
        header = f"config {self.config_id} ({self.total} steps)"
        rows = [f"  {label.value:<24} {self.percentages[label]:>7.2f}%" for label in LABEL_ORDER]
        return "\n".join([header, *rows])


def tally(judgments: Iterable[StepJudgment], config_id: str) -> TallyResult:
    counts = {label: 0 for label in LABEL_ORDER}
    total = 0
    for judgment in judgments:
        if judgment.config_id != config_id:
            continue
        counts[classify_step(judgment.flags)] += 1
        total += 1
    if total == 0:
        raise EmptyConfig(f"no judgments recorded for config '{config_id}'")
    return TallyResult(config_id=config_id, total=total, counts=counts)


# ---------------------------------------------------------------------------
# Key-point scoring

CRITERION_CATEGORIES = (
    "variable_definition",
    "sublemma_statement",
    "sublemma_proof",
    "proof_method",
    "theorem_reference",
    "composite",
)
VERDICTS = ("captured", "partial", "missed")


@dataclass(frozen=True)
class CriterionJudgment:
    proof_id: str
    criterion_id: str
    category: str
    verdict: str
    component_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.category not in CRITERION_CATEGORIES:
            raise ValidationError(f"unknown criterion category '{self.category}'")
        if self.verdict not in VERDICTS:
            raise ValidationError(f"unknown verdict '{self.verdict}'")
        if self.category == "composite" and not self.component_ids:
            raise ValidationError(
                f"composite criterion '{self.criterion_id}' must list its component ids"
            )


def score_proof(judgments: Sequence[CriterionJudgment]) -> float:
    """(captured + 0.5 * partial) / total; permutation-invariant, in [0, 1]."""
    judgments = list(judgments)
    if not judgments:
        raise EmptyCriteria("cannot score a proof with zero criteria")
    captured = sum(1 for j in judgments if j.verdict == "captured")
    partial = sum(1 for j in judgments if j.verdict == "partial")
    return (captured + 0.5 * partial) / len(judgments)


def format_score(score: float) -> str:
    """3 d.p. display, via an intermediate 4-place half-up step.

    The reference results this harness reproduces round through four
    places: 92.5/108 must display as 0.857, which single-stage rounding
    (0.856) would miss.
    """
    four = Decimal(repr(score)).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP)
    return str(four.quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


# ---------------------------------------------------------------------------
# Paired significance test over discordant counts


@dataclass(frozen=True)
class PairedOutcome:
    item_id: str
    correct_under_a: bool
    correct_under_b: bool


def discordant_counts(outcomes: Iterable[PairedOutcome]) -> tuple[int, int]:
    """(A-only-correct, B-only-correct) counts."""
    a_only = b_only = 0
    for outcome in outcomes:
        if outcome.correct_under_a and not outcome.correct_under_b:
            a_only += 1
        elif outcome.correct_under_b and not outcome.correct_under_a:
            b_only += 1
    return a_only, b_only


@dataclass(frozen=True)
class McNemarResult:
    chi_squared: float
    p_value: float

    def format_text(self) -> str:
        return f"χ²={self.chi_squared:.4f} p={self.p_value:.4e}"


def mcnemar(b: int, c: int) -> McNemarResult:
    """Continuity-corrected paired test on discordant counts.

    chi² = (|b − c| − 1)² / (b + c), with the correction floored at zero so
    equal counts give chi² = 0; the p-value is the upper tail of the
    chi-squared distribution with one degree of freedom, erfc(sqrt(chi²/2)).
    """
    if b < 0 or c < 0:
        raise ValueError("discordant counts must be non-negative")
    if b + c == 0:
        raise DegenerateTable("both discordant counts are zero")
    corrected = max(abs(b - c) - 1, 0)
    chi_squared = corrected * corrected / (b + c)
    p_value = math.erfc(math.sqrt(chi_squared / 2.0))
    return McNemarResult(chi_squared=chi_squared, p_value=p_value)


# ---------------------------------------------------------------------------
# Assistive pre-annotation

_JUXTAPOSITION_RE = re.compile(
    r"(?=(?<![A-Za-z0-9_.'])([A-Za-z_][A-Za-z0-9_.']*)[ \t]+([A-Za-z])(?![A-Za-z0-9_.']))"
)
_BACKTICK_RE = re.compile(r"`[^`]+`")


def autoflag_formal_syntax(
    text: str,
    premise_names: Sequence[str] = (),
    variable_names: Sequence[str] = (),
) -> bool:
    """True iff the text shows mechanical signs of untranslated formal syntax.

    Checks: the turnstile and cast markers, backtick-quoted identifiers,
    verbatim fully-qualified premise names, and function application by
    juxtaposition (an in-scope identifier followed by a bare single-letter
    in-scope name, as in "x n").
    """
    if "⊢" in text or "↑" in text:
        return True
    if _BACKTICK_RE.search(text):
        return True
    for name in premise_names:
        if re.search(rf"(?<![A-Za-z0-9_.']){re.escape(name)}(?![A-Za-z0-9_.'])", text):
            return True
    scope = set(premise_names) | set(variable_names)
    if scope:
        for match in _JUXTAPOSITION_RE.finditer(text):
            head, arg = match.group(1), match.group(2)
            if head in scope and arg in scope:
                return True
    return False


# ---------------------------------------------------------------------------
# Judgment files (JSON-lines)


def _iter_jsonl(path):
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    yield lineno, json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"{path}:{lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc


def load_step_judgments(path) -> list[StepJudgment]:
    judgments = []
    for lineno, doc in _iter_jsonl(path):
        try:
            flags = doc["flags"]
            judgments.append(
                StepJudgment(
                    step_id=doc["step_id"],
                    config_id=doc["config_id"],
                    flags=StepFlags(
                        formal_syntax=bool(flags.get("formal_syntax", False)),
                        misinformation=bool(flags.get("misinformation", False)),
                        insufficient=bool(flags.get("insufficient", False)),
                        unnecessary=bool(flags.get("unnecessary", False)),
                    ),
                )
            )
        except (TypeError, KeyError) as exc:
            raise ParseError(f"{path}:{lineno}: malformed step judgment ({exc})") from exc
    return judgments


def load_criterion_judgments(path) -> list[CriterionJudgment]:
    judgments = []
    for lineno, doc in _iter_jsonl(path):
        try:
            judgments.append(
                CriterionJudgment(
                    proof_id=doc["proof_id"],
                    criterion_id=doc["criterion_id"],
                    category=doc["category"],
                    verdict=doc["verdict"],
                    component_ids=tuple(doc.get("components", [])),
                )
            )
        except (TypeError, KeyError) as exc:
            raise ParseError(f"{path}:{lineno}: malformed criterion judgment ({exc})") from exc
    return judgments


def load_paired_outcomes(path) -> list[PairedOutcome]:
    outcomes = []
    for lineno, doc in _iter_jsonl(path):
        try:
            outcomes.append(
                PairedOutcome(
                    item_id=doc["item_id"],
                    correct_under_a=bool(doc["correct_under_a"]),
                    correct_under_b=bool(doc["correct_under_b"]),
                )
            )
        except (TypeError, KeyError) as exc:
            raise ParseError(f"{path}:{lineno}: malformed paired outcome ({exc})") from exc
    return outcomes
