/**
 * S-expression reader/writer for gateway bodies.
 *
 * Atoms map to: number, symbol (plain string), quoted string (QuotedText).
 * Lists map to arrays. This mirrors the gateway's file formats; the UI
 * never interprets numbers beyond displaying them.
 */

export class QuotedText {
  constructor(public readonly text: string) {}
}

export type Form = number | string | QuotedText | Form[];

export class SexprError extends Error {
  constructor(message: string, public readonly line: number, public readonly col: number) {
    super(`${line}:${col}: ${message}`);
  }
}

const INT_RE = /^[+-]?\d+$/;
const FLOAT_RE = /^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$/;

function classify(token: string): number | string {
  if (INT_RE.test(token)) return parseInt(token, 10);
  if ((token.includes(".") || token.includes("e") || token.includes("E")) && FLOAT_RE.test(token)) {
    return parseFloat(token);
  }
  return token;
}

class Reader {
  private pos = 0;
  private line = 1;
  private col = 1;

  constructor(private readonly text: string) {}

  private advance(): void {
    if (this.text[this.pos] === "\n") {
      this.line += 1;
      this.col = 1;
    } else {
      this.col += 1;
    }
    this.pos += 1;
  }

  private skipWs(): void {
    while (this.pos < this.text.length) {
      const ch = this.text[this.pos];
      if (ch === ";") {
        while (this.pos < this.text.length && this.text[this.pos] !== "\n") this.advance();
      } else if (/\s/.test(ch)) {
        this.advance();
      } else {
        return;
      }
    }
  }

  readAll(): Form[] {
    const forms: Form[] = [];
    for (;;) {
      this.skipWs();
      if (this.pos >= this.text.length) return forms;
      forms.push(this.readForm());
    }
  }

  readForm(): Form {
    this.skipWs();
    if (this.pos >= this.text.length) throw new SexprError("unexpected end of input", this.line, this.col);
    const ch = this.text[this.pos];
    if (ch === "(") return this.readList();
    if (ch === ")") throw new SexprError("unbalanced parenthesis: unexpected ')'", this.line, this.col);
    if (ch === '"') return this.readString();
    return this.readAtom();
  }

  private readList(): Form[] {
    const [openLine, openCol] = [this.line, this.col];
    this.advance();
    const items: Form[] = [];
    for (;;) {
      this.skipWs();
      if (this.pos >= this.text.length) {
        throw new SexprError("unbalanced parenthesis: '(' was never closed", openLine, openCol);
      }
      if (this.text[this.pos] === ")") {
        this.advance();
        return items;
      }
      items.push(this.readForm());
    }
  }

  private readString(): QuotedText {
    const [openLine, openCol] = [this.line, this.col];
    this.advance();
    let out = "";
    for (;;) {
      if (this.pos >= this.text.length) throw new SexprError("unterminated string", openLine, openCol);
      const ch = this.text[this.pos];
      if (ch === '"') {
        this.advance();
        return new QuotedText(out);
      }
      if (ch === "\\") {
        this.advance();
        if (this.pos >= this.text.length) throw new SexprError("unterminated escape", this.line, this.col);
      }
      out += this.text[this.pos];
      this.advance();
    }
  }

  private readAtom(): number | string {
    const start = this.pos;
    while (this.pos < this.text.length) {
      const ch = this.text[this.pos];
      if (/\s/.test(ch) || ch === "(" || ch === ")" || ch === '"' || ch === ";") break;
      this.advance();
    }
    return classify(this.text.slice(start, this.pos));
  }
}

export function parse(text: string): Form[] {
  return new Reader(text).readAll();
}

export function parseOne(text: string): Form {
  const forms = parse(text);
  if (forms.length !== 1) throw new SexprError(`expected one form, found ${forms.length}`, 1, 1);
  return forms[0];
}

export function dumps(form: Form): string {
  if (form instanceof QuotedText) {
    return `"${form.text.replace(/\\/g, "\\\\").replace(/"/g, '\\"')}"`;
  }
  if (typeof form === "number") return fmtNum(form);
  if (typeof form === "string") return form;
  return `(${form.map(dumps).join(" ")})`;
}

/** Coordinate formatting identical to the gateway's: 3 decimals, no -0. */
export function fmtCoord(value: number): string {
  const s = value.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export function fmtNum(value: number): string {
  if (Number.isInteger(value)) return String(value);
  const s = String(value);
  return s;
}

/** Value following `:name` in a (head :kw value ...) form. */
export function keyword(form: Form[], name: string): Form | undefined {
  const key = ":" + name;
  for (let i = 0; i < form.length; i += 1) {
    if (form[i] === key) return form[i + 1];
  }
  return undefined;
}

/** Child forms whose head symbol is `head`. */
export function sublists(form: Form[], head: string): Form[][] {
  const out: Form[][] = [];
  for (const item of form) {
    if (Array.isArray(item) && item[0] === head) out.push(item);
  }
  return out;
}
