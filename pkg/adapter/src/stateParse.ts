/** Parsing of pretty-printed proof-state strings from extraction dumps. */

import { SourceFormatError } from "./errors.js";
import type { CanonicalState } from "./types.js";

/**
 * Parse a newline-separated state string into hypothesis pairs and goals.
 *
 * Hypothesis lines read `names : statement` (split on the FIRST " : ", so
 * statements may contain colons); `names` may group several labels of the
 * same statement, which are ungrouped in order. Goal lines start with `⊢ `.
 * The literal `no goals` denotes a closed state.
 */
export function parseState(text: string, where: string): CanonicalState {
    const trimmed = text.trim();
    if (trimmed === "no goals") {
        return { hyps: [], goals: [] };
    }
    const hyps: [string, string][] = [];
    const goals: string[] = [];
    for (const rawLine of trimmed.split("\n")) {
        const line = rawLine.trim();
        if (!line) continue;
        if (line.startsWith("⊢")) {
            const goal = line.slice(1).trim();
            if (!goal) {
                throw new SourceFormatError(`${where}: empty goal line`);
            }
            goals.push(goal);
            continue;
        }
        if (goals.length > 0) {
            throw new SourceFormatError(`${where}: hypothesis line after a goal line: ${line}`);
        }
        const split = line.indexOf(" : ");
        if (split < 0) {
            throw new SourceFormatError(`${where}: malformed hypothesis line: ${line}`);
        }
        const names = line.slice(0, split).trim().split(/\s+/);
        const statement = line.slice(split + 3).trim();
        if (names.length === 0 || !statement) {
            throw new SourceFormatError(`${where}: malformed hypothesis line: ${line}`);
        }
        for (const name of names) {
            hyps.push([name, statement]);
        }
    }
    if (goals.length === 0 && hyps.length > 0) {
        throw new SourceFormatError(`${where}: state has hypotheses but no goal line`);
    }
    return { hyps, goals };
}

const COMBINATOR_MARKERS = ["·", ".", "<;>"];
const HEAD_TOKEN = /^[A-Za-z_][A-Za-z0-9_'!?]*/;

/** Leading tactic token with focus markers stripped (total over non-empty input). */
export function classifyTacticKind(tacticText: string): string {
    let text = tacticText.trim();
    if (!text) {
        throw new SourceFormatError("empty tactic text");
    }
    let stripped = true;
    while (stripped) {
        stripped = false;
        for (const marker of COMBINATOR_MARKERS) {
            if (
                text.startsWith(marker) &&
                (text.length === marker.length || /\s/.test(text[marker.length]))
            ) {
                text = text.slice(marker.length).trimStart();
                stripped = true;
            }
        }
    }
    if (!text) {
        return tacticText.trim().split(/\s+/)[0];
    }
    const match = HEAD_TOKEN.exec(text);
    if (match) {
        return match[0];
    }
    return text.split(/\s+/)[0];
}
