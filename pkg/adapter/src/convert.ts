/** Dump loading and conversion into canonical trace documents. */

import * as fs from "node:fs";
import * as path from "node:path";

import { EmptySelection, SourceFormatError } from "./errors.js";
import { classifyTacticKind, parseState } from "./stateParse.js";
import type {
    CanonicalAstNode,
    CanonicalStep,
    CanonicalTrace,
    Dump,
    DumpAst,
    DumpPremise,
    DumpTheorem,
} from "./types.js";

function readJsonl(filePath: string): unknown[] {
    let text: string;
    try {
        text = fs.readFileSync(filePath, "utf-8");
    } catch {
        throw new SourceFormatError(`missing required dump file: ${filePath}`);
    }
    const rows: unknown[] = [];
    text.split("\n").forEach((line, index) => {
        if (!line.trim()) return;
        try {
            rows.push(JSON.parse(line));
        } catch (error) {
            throw new SourceFormatError(`${filePath}:${index + 1}: ${(error as Error).message}`);
        }
    });
    return rows;
}

function requireString(value: unknown, where: string): string {
    if (typeof value !== "string") {
        throw new SourceFormatError(`${where}: expected a string`);
    }
    return value;
}

function requirePosition(value: unknown, where: string): { line: number; column: number } {
    const pos = value as { line?: unknown; column?: unknown } | null;
    if (
        pos === null ||
        typeof pos !== "object" ||
        typeof pos.line !== "number" ||
        typeof pos.column !== "number"
    ) {
        throw new SourceFormatError(`${where}: expected {line, column}`);
    }
    return { line: pos.line, column: pos.column };
}

function requireStringArray(value: unknown, where: string): string[] {
    if (!Array.isArray(value) || !value.every((item) => typeof item === "string")) {
        throw new SourceFormatError(`${where}: expected an array of strings`);
    }
    return value;
}

export function loadDump(sourceDir: string): Dump {
    const theorems = readJsonl(path.join(sourceDir, "theorems.jsonl")).map((row, i) => {
        const where = `theorems.jsonl[${i}]`;
        const doc = row as Record<string, unknown>;
        const tacticsRaw = doc.tactics;
        if (!Array.isArray(tacticsRaw)) {
            throw new SourceFormatError(`${where}: expected a tactics array`);
        }
        const theorem: DumpTheorem = {
            full_name: requireString(doc.full_name, `${where}.full_name`),
            statement: requireString(doc.statement, `${where}.statement`),
            file_path: requireString(doc.file_path, `${where}.file_path`),
            tactics: tacticsRaw.map((tacticRow, j) => {
                const tWhere = `${where}.tactics[${j}]`;
                const tactic = tacticRow as Record<string, unknown>;
                const premisesRaw = tactic.premises;
                if (
                    !Array.isArray(premisesRaw) ||
                    !premisesRaw.every(
                        (p) => p !== null && typeof p === "object" &&
                            typeof (p as { full_name?: unknown }).full_name === "string",
                    )
                ) {
                    throw new SourceFormatError(`${tWhere}.premises: expected [{full_name}]`);
                }
                return {
                    tactic: requireString(tactic.tactic, `${tWhere}.tactic`),
                    state_before: requireString(tactic.state_before, `${tWhere}.state_before`),
                    state_after: requireString(tactic.state_after, `${tWhere}.state_after`),
                    premises: premisesRaw as { full_name: string }[],
                    pos: requirePosition(tactic.pos, `${tWhere}.pos`),
                    end_pos: requirePosition(tactic.end_pos, `${tWhere}.end_pos`),
                };
            }),
        };
        return theorem;
    });

    const premises = new Map<string, DumpPremise>();
    readJsonl(path.join(sourceDir, "premises.jsonl")).forEach((row, i) => {
        const where = `premises.jsonl[${i}]`;
        const doc = row as Record<string, unknown>;
        const premise: DumpPremise = {
            full_name: requireString(doc.full_name, `${where}.full_name`),
            type: requireString(doc.type, `${where}.type`),
            module: requireString(doc.module, `${where}.module`),
            kind: requireString(doc.kind, `${where}.kind`),
        };
        premises.set(premise.full_name, premise);
    });

    const asts = new Map<string, DumpAst>();
    readJsonl(path.join(sourceDir, "asts.jsonl")).forEach((row, i) => {
        const where = `asts.jsonl[${i}]`;
        const doc = row as Record<string, unknown>;
        const theoremName = requireString(doc.theorem, `${where}.theorem`);
        const nodesRaw = doc.nodes;
        if (!Array.isArray(nodesRaw)) {
            throw new SourceFormatError(`${where}: expected a nodes array`);
        }
        const nodes = nodesRaw.map((nodeRow, j) => {
            const nWhere = `${where}.nodes[${j}]`;
            const node = nodeRow as Record<string, unknown>;
            const parent = node.parent;
            if (parent !== null && typeof parent !== "string") {
                throw new SourceFormatError(`${nWhere}.parent: expected a string or null`);
            }
            const stepIdx = node.step_idx;
            if (stepIdx !== null && typeof stepIdx !== "number") {
                throw new SourceFormatError(`${nWhere}.step_idx: expected a number or null`);
            }
            return {
                id: requireString(node.id, `${nWhere}.id`),
                kind: requireString(node.kind, `${nWhere}.kind`),
                parent: parent as string | null,
                step_idx: stepIdx as number | null,
                introduces: requireStringArray(node.introduces, `${nWhere}.introduces`),
                mentions: requireStringArray(node.mentions, `${nWhere}.mentions`),
            };
        });
        asts.set(theoremName, { theorem: theoremName, nodes });
    });

    return { theorems, premises, asts };
}

function dedupe(names: string[]): string[] {
    const seen = new Set<string>();
    const out: string[] = [];
    for (const name of names) {
        if (!seen.has(name)) {
            seen.add(name);
            out.push(name);
        }
    }
    return out;
}

function buildAst(ast: DumpAst, stepIds: string[]): CanonicalAstNode {
    const roots = ast.nodes.filter((node) => node.parent === null);
    if (roots.length !== 1) {
        throw new SourceFormatError(
            `ast for ${ast.theorem}: expected exactly one root node, found ${roots.length}`,
        );
    }
    const byId = new Map(ast.nodes.map((node) => [node.id, node]));
    if (byId.size !== ast.nodes.length) {
        throw new SourceFormatError(`ast for ${ast.theorem}: duplicate node ids`);
    }

    const childIds = new Map<string, string[]>();
    for (const node of ast.nodes) {
        if (node.parent === null) continue;
        // Parents pointing outside the node list leave the node unreachable;
        // it is pruned below together with its descendants.
        if (!byId.has(node.parent)) continue;
        const siblings = childIds.get(node.parent) ?? [];
        siblings.push(node.id);
        childIds.set(node.parent, siblings);
    }

    const build = (nodeId: string): CanonicalAstNode => {
        const node = byId.get(nodeId)!;
        const canonical: CanonicalAstNode = {
            id: node.id,
            kind: node.kind,
            children: (childIds.get(nodeId) ?? []).map(build),
            introduces: node.introduces,
            mentions: node.mentions,
        };
        if (node.step_idx !== null) {
            if (node.step_idx < 0 || node.step_idx >= stepIds.length) {
                throw new SourceFormatError(
                    `ast for ${ast.theorem}: node ${node.id} references step index ${node.step_idx}`,
                );
            }
            canonical.step = stepIds[node.step_idx];
        }
        // Key order is normative: id, kind, children, step?, introduces, mentions.
        return {
            id: canonical.id,
            kind: canonical.kind,
            children: canonical.children,
            ...(canonical.step !== undefined ? { step: canonical.step } : {}),
            introduces: canonical.introduces,
            mentions: canonical.mentions,
        };
    };
    return build(roots[0].id);
}

export function convertTheorem(theorem: DumpTheorem, dump: Dump): CanonicalTrace {
    const stepIds = theorem.tactics.map((_, index) => `s${index + 1}`);
    const steps: CanonicalStep[] = theorem.tactics.map((tactic, index) => {
        const where = `${theorem.full_name}: tactic ${index}`;
        return {
            id: stepIds[index],
            tactic: tactic.tactic,
            kind: classifyTacticKind(tactic.tactic),
            before: parseState(tactic.state_before, `${where} before`),
            after: parseState(tactic.state_after, `${where} after`),
            premises: dedupe(tactic.premises.map((p) => p.full_name)),
            span: [
                [tactic.pos.line, tactic.pos.column],
                [tactic.end_pos.line, tactic.end_pos.column],
            ],
        };
    });

    const referenced = dedupe(steps.flatMap((step) => step.premises));
    const premises = referenced.map((name) => {
        const premise = dump.premises.get(name);
        if (!premise) {
            throw new SourceFormatError(
                `${theorem.full_name}: premise '${name}' missing from premises.jsonl`,
            );
        }
        return { name: premise.full_name, type: premise.type, module: premise.module };
    });

    const ast = dump.asts.get(theorem.full_name);
    if (!ast) {
        throw new SourceFormatError(`${theorem.full_name}: no ast record in asts.jsonl`);
    }

    return {
        theorem_name: theorem.full_name,
        theorem_statement: theorem.statement,
        steps,
        premises,
        ast: buildAst(ast, stepIds),
    };
}

/** Canonical text form, byte-compatible with the pipeline's serializer. */
export function serializeTrace(trace: CanonicalTrace): string {
    return JSON.stringify(trace, null, 2) + "\n";
}

export function convert(sourceDir: string, theoremFilter?: string): Map<string, string> {
    const dump = loadDump(sourceDir);
    const selected = dump.theorems.filter(
        (theorem) => !theoremFilter || theorem.full_name.includes(theoremFilter),
    );
    if (selected.length === 0) {
        throw new EmptySelection(
            theoremFilter
                ? `no theorem matches filter '${theoremFilter}'`
                : "the dump contains no theorems",
        );
    }
    const out = new Map<string, string>();
    for (const theorem of selected) {
        out.set(theorem.full_name, serializeTrace(convertTheorem(theorem, dump)));
    }
    return out;
}
