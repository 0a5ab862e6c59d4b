/** Shapes of the extraction dump (input) and the canonical trace (output). */

export interface DumpTactic {
    tactic: string;
    state_before: string;
    state_after: string;
    premises: { full_name: string }[];
    pos: { line: number; column: number };
    end_pos: { line: number; column: number };
}

export interface DumpTheorem {
    full_name: string;
    statement: string;
    file_path: string;
    tactics: DumpTactic[];
}

export interface DumpPremise {
    full_name: string;
    type: string;
    module: string;
    kind: string;
}

export interface DumpAstNode {
    id: string;
    kind: string;
    parent: string | null;
    step_idx: number | null;
    introduces: string[];
    mentions: string[];
}

export interface DumpAst {
    theorem: string;
    nodes: DumpAstNode[];
}

export interface Dump {
    theorems: DumpTheorem[];
    premises: Map<string, DumpPremise>;
    asts: Map<string, DumpAst>;
}

/** Canonical trace shapes; key order here is normative for serialization. */

export interface CanonicalState {
    hyps: [string, string][];
    goals: string[];
}

export interface CanonicalStep {
    id: string;
    tactic: string;
    kind: string;
    before: CanonicalState;
    after: CanonicalState;
    premises: string[];
    span: [[number, number], [number, number]];
}

export interface CanonicalPremise {
    name: string;
    type: string;
    module: string;
}

export interface CanonicalAstNode {
    id: string;
    kind: string;
    children: CanonicalAstNode[];
    step?: string;
    introduces: string[];
    mentions: string[];
}

export interface CanonicalTrace {
    theorem_name: string;
    theorem_statement: string;
    steps: CanonicalStep[];
    premises: CanonicalPremise[];
    ast: CanonicalAstNode;
}
