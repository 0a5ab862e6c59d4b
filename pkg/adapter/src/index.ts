export { convert, convertTheorem, loadDump, serializeTrace } from "./convert.js";
export { classifyTacticKind, parseState } from "./stateParse.js";
export { EmptySelection, SourceFormatError } from "./errors.js";
export type * from "./types.js";
