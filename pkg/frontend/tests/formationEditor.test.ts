import { describe, expect, it } from "vitest";

import { FormationEditor, draftDiagnostics, strategicMapSource, TrainingPair } from "../src/formationEditor.js";
import { GatewayClient, Marker, Transport } from "../src/gateway.js";
import { parseOne } from "../src/sexpr.js";
import { liveClient } from "./helpers.js";

function gridDraft(): TrainingPair[] {
  const pairs: TrainingPair[] = [];
  for (const bx of [-12, 0, 12]) {
    for (const by of [-8, 0, 8]) {
      const targets = Array.from({ length: 11 }, (_, i) => ({
        x: bx * 0.5,
        y: by * 0.5 + i * 0.1,
      }));
      pairs.push({ ball: { x: bx, y: by }, targets });
    }
  }
  return pairs;
}

function handExampleDraft(): TrainingPair[] {
  // Ball vertices (0,0),(12,0),(0,12); player 1's targets (0,0),(6,0),(0,6).
  const fill = (p: Marker) => Array.from({ length: 11 }, () => ({ ...p }));
  return [
    { ball: { x: 0, y: 0 }, targets: fill({ x: 0, y: 0 }) },
    { ball: { x: 12, y: 0 }, targets: fill({ x: 6, y: 0 }) },
    { ball: { x: 0, y: 12 }, targets: fill({ x: 0, y: 6 }) },
  ];
}

describe("draft validity gate", () => {
  it("requires three non-collinear pairs", () => {
    const two = gridDraft().slice(0, 2);
    expect(draftDiagnostics(two)).toMatch(/non-collinear/);
    const collinear: TrainingPair[] = [0, 1, 2].map((i) => ({
      ball: { x: i * 3, y: i * 3 },
      targets: gridDraft()[0].targets,
    }));
    expect(draftDiagnostics(collinear)).toMatch(/non-collinear/);
    expect(draftDiagnostics(gridDraft())).toBe("");
  });

  it("disables the preview with the diagnostic", async () => {
    const { client } = liveClient();
    const editor = new FormationEditor(client);
    editor.setPairs(gridDraft().slice(0, 2));
    await editor.dragBall({ x: 1, y: 1 });
    expect(editor.preview.enabled).toBe(false);
    expect(editor.preview.reason).toMatch(/non-collinear/);
  });
});

describe("interpolation preview against the live gateway", () => {
  it("renders the /interpolate response verbatim for 50 scripted drags", async () => {
    const { client, transport } = liveClient();
    const editor = new FormationEditor(client);
    editor.setPairs(gridDraft());

    const positions: Marker[] = [];
    for (let i = 0; i < 50; i += 1) {
      positions.push({ x: -14 + (28 * i) / 49, y: -9 + ((i * 7) % 19) });
    }
    for (const ball of positions) {
      await editor.dragBall(ball);
      expect(editor.preview.enabled).toBe(true);
      expect(editor.preview.markers).toHaveLength(11);

      // Fidelity: markers equal the raw gateway response, reparsed here
      // independently of the client's own parsing.
      const exchange = transport.last("/interpolate");
      expect(exchange.status).toBe(200);
      const form = parseOne(exchange.text) as unknown[];
      expect(form[0]).toBe("targets");
      const expected = (form.slice(1) as [number, number][]).map(([x, y]) => ({ x, y }));
      expect(editor.preview.markers).toEqual(expected);
    }
    expect(transport.exchanges.filter((e) => e.path === "/interpolate")).toHaveLength(50);
  });

  it("reproduces the worked barycentric example through the service", async () => {
    const { client } = liveClient();
    const editor = new FormationEditor(client);
    editor.setPairs(handExampleDraft());
    await editor.dragBall({ x: 4, y: 4 });
    expect(editor.preview.markers[0]).toEqual({ x: 2, y: 2 });
  });

  it("reports a training vertex exactly", async () => {
    const { client } = liveClient();
    const editor = new FormationEditor(client);
    const draft = gridDraft();
    editor.setPairs(draft);
    await editor.dragBall(draft[4].ball);
    draft[4].targets.forEach((target, i) => {
      expect(editor.preview.markers[i].x).toBeCloseTo(target.x, 3);
      expect(editor.preview.markers[i].y).toBeCloseTo(target.y, 3);
    });
  });
});

class GatedTransport implements Transport {
  inFlight = 0;
  maxInFlight = 0;
  total = 0;
  private releases: (() => void)[] = [];

  async request(_method: string, _path: string, _body?: string) {
    this.total += 1;
    this.inFlight += 1;
    this.maxInFlight = Math.max(this.maxInFlight, this.inFlight);
    await new Promise<void>((resolve) => this.releases.push(resolve));
    this.inFlight -= 1;
    return { status: 200, text: "(targets (0.000 0.000))" };
  }

  releaseAll() {
    const pending = this.releases;
    this.releases = [];
    pending.forEach((release) => release());
  }
}

describe("drag debouncing", () => {
  it("keeps at most one request in flight and coalesces stale positions", async () => {
    const transport = new GatedTransport();
    const editor = new FormationEditor(new GatewayClient(transport));
    editor.setPairs(gridDraft());

    const drags = [1, 2, 3, 4, 5].map((i) => editor.dragBall({ x: i, y: 0 }));
    await new Promise((resolve) => setTimeout(resolve, 10));
    expect(transport.maxInFlight).toBe(1);
    transport.releaseAll(); // finish request #1 -> only the newest queued goes out
    await new Promise((resolve) => setTimeout(resolve, 10));
    transport.releaseAll();
    await Promise.all(drags);
    expect(transport.total).toBe(2);
    expect(transport.maxInFlight).toBe(1);
  });
});
