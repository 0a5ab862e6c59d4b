"""Translate Lean 4 tactic traces into readable natural-language proofs."""

from .backend import (
    BackendConfig,
    ChatMessage,
    ChatRequest,
    HttpBackend,
    MockBackend,
    RecordingBackend,
    ReplayBackend,
    request_hash,
    request_to_text,
)
from .errors import (
    BackendError,
    CatalogError,
    ConfigError,
    CycleError,
    DegenerateTable,
    EmptyConfig,
    EmptyCriteria,
    InsufficientFewshotWarning,
    MissingExplanation,
    MissingSlot,
    ParseError,
    PipelineError,
    PromptBudgetError,
    ReplayMiss,
    StructureError,
    ValidationError,
)
from .evaluation import (
    CriterionJudgment,
    McNemarResult,
    PairedOutcome,
    StepFlags,
    StepJudgment,
    StepLabel,
    autoflag_formal_syntax,
    classify_step,
    discordant_counts,
    format_score,
    mcnemar,
    score_proof,
    tally,
)
from .informalize import (
    FewshotExample,
    StatementExample,
    StepExplanation,
    assemble_informalize_prompt,
    assemble_statement_prompt,
    build_step_request,
    lint_explanation,
    informalize_statement,
    informalize_step,
    informalize_trace,
    load_fewshot_pool,
    load_statement_fewshots,
    select_fewshots,
    statement_premises,
)
from .premises import (
    ModuleNode,
    PremiseLibrary,
    PremiseRecord,
    generate_explanations,
    level_modules,
    load_library,
    load_modules,
    save_library,
)
from .summarize import SubProof, assemble_summarize_prompt, internal_node_count, summarize_tree
from .templates import (
    SlotSpec,
    Template,
    TemplateCatalog,
    UsageFacts,
    derive_usage_facts,
    render_skeleton,
    select_template,
)
from .trace import (
    AstNode,
    PremiseRef,
    ProofState,
    ProofTrace,
    TacticStep,
    classify_tactic_kind,
    load_trace,
    parse_trace,
    serialize_trace,
    validate_trace,
)
from .tree import (
    ProofTreeNode,
    attach_explanations,
    build_tree,
    tree_to_dot,
    tree_to_text,
)

__version__ = "0.1.0"
