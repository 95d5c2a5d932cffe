/**
 * Gateway client: the UI's only doorway to domain computation.
 *
 * Every number the designer displays comes back from these endpoints; the
 * client parses responses but never recomputes them. The transport is
 * pluggable so tests can replay recorded gateway responses.
 */

import { Form, parse, parseOne, keyword, sublists, fmtCoord } from "./sexpr.js";

export interface Transport {
  request(method: string, path: string, body?: string): Promise<{ status: number; text: string }>;
}

export class FetchTransport implements Transport {
  constructor(private readonly baseUrl: string) {}

  async request(method: string, path: string, body?: string) {
    const response = await fetch(this.baseUrl + path, {
      method,
      body,
      headers: body === undefined ? {} : { "content-type": "text/plain" },
    });
    return { status: response.status, text: await response.text() };
  }
}

export class GatewayError extends Error {
  constructor(message: string, public readonly status: number, public readonly body: string) {
    super(message);
  }
}

export interface Marker {
  x: number;
  y: number;
}

export interface Diagnostic {
  code: string;
  message: string;
}

export interface JobStatus {
  id: number;
  state: "running" | "done" | "error" | "canceled";
  progress: number;
  report?: TrialReport;
  error?: string;
}

export interface TrialReport {
  setplayId: number;
  trials: number;
  successes: number;
  rate: number | null; // null: undefined (0/0)
  seeds: number[];
}

function asNumber(form: Form | undefined, what: string): number {
  if (typeof form !== "number") throw new GatewayError(`expected number for ${what}`, 0, "");
  return form;
}

export function parseTrialReport(form: Form[]): TrialReport {
  const rate = keyword(form, "rate");
  const seeds = (keyword(form, "seeds") as Form[]) ?? [];
  return {
    setplayId: asNumber(keyword(form, "setplay"), "setplay id"),
    trials: asNumber(keyword(form, "trials"), "trials"),
    successes: asNumber(keyword(form, "successes"), "successes"),
    rate: rate === "undefined" ? null : asNumber(rate, "rate"),
    seeds: seeds.map((s) => asNumber(s, "seed")),
  };
}

export class GatewayClient {
  constructor(private readonly transport: Transport) {}

  private async call(method: string, path: string, body?: string): Promise<string> {
    const { status, text } = await this.transport.request(method, path, body);
    if (status >= 400) throw new GatewayError(`${method} ${path} -> ${status}`, status, text);
    return text;
  }

  /** POST /interpolate — markers are the response, verbatim. */
  async interpolate(strategicMapSource: string, ball: Marker): Promise<Marker[]> {
    const body = `(interpolate :ball (${fmtCoord(ball.x)} ${fmtCoord(ball.y)})\n${strategicMapSource})`;
    const text = await this.call("POST", "/interpolate", body);
    const form = parseOne(text) as Form[];
    if (form[0] !== "targets") throw new GatewayError("malformed targets response", 0, text);
    return (form.slice(1) as Form[][]).map((pair) => ({
      x: asNumber(pair[0], "target x"),
      y: asNumber(pair[1], "target y"),
    }));
  }

  /** POST /setplay/validate — diagnostics verbatim. */
  async validateSetplay(source: string): Promise<Diagnostic[]> {
    const text = await this.call("POST", "/setplay/validate", source);
    const form = parseOne(text) as Form[];
    return (form.slice(1) as Form[][]).map((d) => ({
      code: String(d[0]),
      message: d[1] instanceof Object && "text" in (d[1] as object) ? (d[1] as { text: string }).text : String(d[1]),
    }));
  }

  /** POST /setplay/fmt — the canonical formatter is the gateway's. */
  async formatSetplay(source: string): Promise<string> {
    return this.call("POST", "/setplay/fmt", source);
  }

  async putFormation(name: string, document: string): Promise<void> {
    await this.call("PUT", `/formations/${name}`, document);
  }

  async getFormation(name: string): Promise<string> {
    return this.call("GET", `/formations/${name}`);
  }

  async submitTrials(setplaySource: string, scenarioSource: string, n: number, seed: number): Promise<number> {
    const body = `(trials :n ${n} :seed ${seed}\n${setplaySource}\n${scenarioSource})`;
    const text = await this.call("POST", "/trials", body);
    const form = parseOne(text) as Form[];
    return asNumber(keyword(form, "id"), "job id");
  }

  async jobStatus(jobId: number): Promise<JobStatus> {
    const text = await this.call("GET", `/jobs/${jobId}`);
    const form = parseOne(text) as Form[];
    const reports = sublists(form, "trial-report");
    return {
      id: asNumber(keyword(form, "id"), "job id"),
      state: String(keyword(form, "state")) as JobStatus["state"],
      progress: asNumber(keyword(form, "progress"), "progress"),
      report: reports.length ? parseTrialReport(reports[0]) : undefined,
      error: keyword(form, "error") === undefined ? undefined : String(keyword(form, "error")),
    };
  }

  async cancelJob(jobId: number): Promise<void> {
    await this.call("POST", `/jobs/${jobId}/cancel`);
  }

  async jobLog(jobId: number): Promise<string> {
    return this.call("GET", `/logs/${jobId}`);
  }

  async jobStats(jobId: number): Promise<string> {
    return this.call("GET", `/stats/${jobId}`);
  }
}

/** Parsed per-cycle record of the match log (for the playback viewer). */
export interface CycleFrame {
  cycle: number;
  playMode: string;
  score: [number, number];
  ball: { x: number; y: number };
  agents: { id: string; x: number; y: number; heading: number }[];
}

export function parseCycleLine(line: string): CycleFrame | null {
  if (line.startsWith("#")) return null;
  const parts = line.split(";");
  if (parts.length !== 5) return null;
  const ball = parts[3].match(/ball\(([-\d.]+),([-\d.]+),/);
  if (!ball) return null;
  const agents: CycleFrame["agents"] = [];
  const agentRe = /([LR]\d+)\(([-\d.]+),([-\d.]+),([-\d.]+),/g;
  let m: RegExpExecArray | null;
  while ((m = agentRe.exec(parts[4])) !== null) {
    agents.push({ id: m[1], x: parseFloat(m[2]), y: parseFloat(m[3]), heading: parseFloat(m[4]) });
  }
  const [sl, sr] = parts[2].split("-").map((v) => parseInt(v, 10));
  return {
    cycle: parseInt(parts[0], 10),
    playMode: parts[1],
    score: [sl, sr],
    ball: { x: parseFloat(ball[1]), y: parseFloat(ball[2]) },
    agents,
  };
}
