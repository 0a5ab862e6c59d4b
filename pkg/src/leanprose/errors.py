"""Shared exception and warning types for the pipeline."""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PipelineError):
    """Invalid configuration: missing paths, malformed config, bad parameters."""


class ParseError(PipelineError):
    """A file could not be parsed; the message carries location diagnostics."""


class ValidationError(PipelineError):
    """Parsed data violates an invariant of the domain model."""


class CycleError(ValidationError):
    """The module import graph contains a cycle."""

    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__("import cycle: " + " -> ".join(self.cycle))


class BackendError(PipelineError):
    """A chat-completion call failed after any configured retries.

    `kind` is one of "transport", "auth", "rate_limit", "malformed_response".
    """

    KINDS = ("transport", "auth", "rate_limit", "malformed_response")

    def __init__(self, kind: str, message: str):
        if kind not in self.KINDS:
            raise ValueError(f"unknown backend error kind: {kind!r}")
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class ReplayMiss(PipelineError):
    """A replay session has no recorded response for a request hash."""


class CatalogError(PipelineError):
    """The template catalog is malformed or lacks the generic fallback."""


class MissingSlot(PipelineError):
    """A template slot has no value during deterministic rendering."""

    def __init__(self, slot_name: str):
        self.slot_name = slot_name
        super().__init__(f"no value provided for slot [{slot_name}]")


class StructureError(PipelineError):
    """The proof tree cannot be built from the trace's syntax tree."""


class MissingExplanation(PipelineError):
    """Explanations do not cover every step of a proof tree."""

    def __init__(self, step_ids: list[str]):
        self.step_ids = list(step_ids)
        super().__init__("missing explanations for steps: " + ", ".join(self.step_ids))


class PromptBudgetError(PipelineError):
    """Child texts exceed the per-prompt character budget (never truncated)."""


class EmptyConfig(PipelineError):
    """No judgments exist for the requested configuration."""


class EmptyCriteria(PipelineError):
    """A proof score was requested over zero criteria."""


class DegenerateTable(PipelineError):
    """Both discordant counts are zero; the paired test is undefined."""


class InsufficientFewshotWarning(UserWarning):
    """Fewer few-shot candidates than requested; generation degrades."""
