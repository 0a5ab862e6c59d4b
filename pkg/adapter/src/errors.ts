/** Error types surfaced by the converter. */

export class SourceFormatError extends Error {
    constructor(message: string) {
        super(message);
        this.name = "SourceFormatError";
    }
}

export class EmptySelection extends Error {
    constructor(message: string) {
        super(message);
        this.name = "EmptySelection";
    }
}
