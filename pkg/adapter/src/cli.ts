#!/usr/bin/env node
/**
 * Convert an extraction dump directory into canonical trace files.
 *
 * Usage: lean-trace-adapter --source <dump-dir> --out <dir> [--theorem <name>]
 *
 * Exit codes: 1 usage, 2 empty selection, 3 source format error.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { convert } from "./convert.js";
import { EmptySelection, SourceFormatError } from "./errors.js";

function parseArgs(argv: string[]): { source: string; out: string; theorem?: string } {
    const args: Record<string, string> = {};
    for (let i = 0; i < argv.length; i += 2) {
        const flag = argv[i];
        const value = argv[i + 1];
        if (!flag.startsWith("--") || value === undefined) {
            throw new Error(`unexpected argument: ${flag}`);
        }
        args[flag.slice(2)] = value;
    }
    if (!args.source || !args.out) {
        throw new Error("usage: lean-trace-adapter --source <dump-dir> --out <dir> [--theorem <name>]");
    }
    return { source: args.source, out: args.out, theorem: args.theorem };
}

export function main(argv: string[]): number {
    let options;
    try {
        options = parseArgs(argv);
    } catch (error) {
        console.error((error as Error).message);
        return 1;
    }
    try {
        const traces = convert(options.source, options.theorem);
        fs.mkdirSync(options.out, { recursive: true });
        for (const [name, text] of traces) {
            const outPath = path.join(options.out, `${name}.trace`);
            fs.writeFileSync(outPath, text, "utf-8");
            console.log(`wrote ${outPath}`);
        }
        return 0;
    } catch (error) {
        if (error instanceof EmptySelection) {
            console.error(`empty selection: ${error.message}`);
            return 2;
        }
        if (error instanceof SourceFormatError) {
            console.error(`source format error: ${error.message}`);
            return 3;
        }
        throw error;
    }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
    process.exit(main(process.argv.slice(2)));
}
