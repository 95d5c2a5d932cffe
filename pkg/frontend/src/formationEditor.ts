/**
 * Formation editor view-model: strategic-map drafts with live interpolation
 * preview.
 *
 * The editor owns training pairs (ball position -> 11 targets) and a
 * draggable ball handle. Preview markers are exactly the gateway's
 * /interpolate response; while a drag gesture is running at most one
 * request is in flight and only the newest pending position is sent when
 * it returns.
 */

import { GatewayClient, Marker } from "./gateway.js";
import { fmtCoord } from "./sexpr.js";

export interface TrainingPair {
  ball: Marker;
  targets: Marker[]; // exactly 11
}

export interface PreviewState {
  enabled: boolean;
  reason: string; // why the preview is disabled, '' when enabled
  markers: Marker[];
  ball: Marker;
}

function collinear(points: Marker[]): boolean {
  if (points.length < 3) return true;
  const [a, b] = points;
  return points.every(
    (p) => Math.abs((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) <= 1e-9,
  );
}

export function draftDiagnostics(pairs: TrainingPair[]): string {
  if (pairs.length < 3 || collinear(pairs.map((p) => p.ball))) {
    return ">=3 non-collinear pairs required";
  }
  for (const pair of pairs) {
    if (pair.targets.length !== 11) return "every pair needs exactly 11 targets";
  }
  const seen = new Set<string>();
  for (const pair of pairs) {
    const key = `${fmtCoord(pair.ball.x)},${fmtCoord(pair.ball.y)}`;
    if (seen.has(key)) return `duplicate training ball position (${key})`;
    seen.add(key);
  }
  return "";
}

export function strategicMapSource(pairs: TrainingPair[], situation = "default"): string {
  const lines = [`(strategic-map :situation ${situation}`];
  for (const pair of pairs) {
    const targets = pair.targets.map((t) => `(${fmtCoord(t.x)} ${fmtCoord(t.y)})`).join(" ");
    lines.push(
      `  (pair :ball (${fmtCoord(pair.ball.x)} ${fmtCoord(pair.ball.y)}) :targets (${targets}))`,
    );
  }
  return lines.join("\n") + ")";
}

export class FormationEditor {
  pairs: TrainingPair[] = [];
  preview: PreviewState = { enabled: false, reason: "empty draft", markers: [], ball: { x: 0, y: 0 } };
  dirty = false;

  private inFlight = false;
  private pendingBall: Marker | null = null;
  private requestCount = 0;
  private generation = 0;

  constructor(private readonly gateway: GatewayClient) {}

  get requestsIssued(): number {
    return this.requestCount;
  }

  setPairs(pairs: TrainingPair[]): void {
    this.pairs = pairs.map((p) => ({ ball: { ...p.ball }, targets: p.targets.map((t) => ({ ...t })) }));
    this.dirty = true;
    this.generation += 1;
    const reason = draftDiagnostics(this.pairs);
    if (reason) {
      this.preview = { enabled: false, reason, markers: [], ball: this.preview.ball };
    }
  }

  /**
   * Move the ball handle. Resolves once the preview reflects some position
   * at or after this one (intermediate drag positions may be skipped, never
   * reordered).
   */
  async dragBall(ball: Marker): Promise<void> {
    const reason = draftDiagnostics(this.pairs);
    if (reason) {
      this.preview = { enabled: false, reason, markers: [], ball };
      return;
    }
    this.pendingBall = ball;
    if (this.inFlight) return; // one request per gesture at a time
    await this.pump();
  }

  private async pump(): Promise<void> {
    while (this.pendingBall !== null) {
      const ball = this.pendingBall;
      this.pendingBall = null;
      this.inFlight = true;
      const generation = this.generation;
      try {
        this.requestCount += 1;
        const markers = await this.gateway.interpolate(strategicMapSource(this.pairs), ball);
        if (generation === this.generation) {
          this.preview = { enabled: true, reason: "", markers, ball };
        }
      } catch (err) {
        this.preview = { enabled: false, reason: String(err), markers: [], ball };
      } finally {
        this.inFlight = false;
      }
    }
  }

  /** Persist through the gateway formats (save -> reload is byte-exact). */
  async save(name: string, document: string): Promise<void> {
    await this.gateway.putFormation(name, document);
    this.dirty = false;
  }
}
