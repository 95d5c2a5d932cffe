/**
 * Browser wiring: field canvas, setplay graph panel, trial runner panel
 * and the websocket playback viewer. Serve the gateway first:
 *
 *     pitchside serve --addr 127.0.0.1:8900
 *
 * then open index.html (any static server). The canvas uses the
 * simulator's coordinate frame; every number on screen is a gateway
 * response rendered verbatim at log precision (3 decimals).
 */

import { FetchTransport, GatewayClient, Marker, parseCycleLine } from "./gateway.js";
import { FormationEditor, strategicMapSource, TrainingPair } from "./formationEditor.js";
import { SetplayDesigner } from "./setplayGraph.js";
import { TrialRunner } from "./trialRunner.js";
import { EditorSession } from "./session.js";
import { fmtCoord } from "./sexpr.js";

const GATEWAY_URL = (window as unknown as { GATEWAY_URL?: string }).GATEWAY_URL ?? "http://127.0.0.1:8900";

const FIELD = { halfLength: 15, halfWidth: 10 };

function fieldToCanvas(canvas: HTMLCanvasElement, p: Marker): [number, number] {
  const sx = canvas.width / (2 * FIELD.halfLength + 2);
  const sy = canvas.height / (2 * FIELD.halfWidth + 2);
  return [(p.x + FIELD.halfLength + 1) * sx, (FIELD.halfWidth + 1 - p.y) * sy];
}

function canvasToField(canvas: HTMLCanvasElement, cx: number, cy: number): Marker {
  const sx = canvas.width / (2 * FIELD.halfLength + 2);
  const sy = canvas.height / (2 * FIELD.halfWidth + 2);
  return { x: cx / sx - FIELD.halfLength - 1, y: FIELD.halfWidth + 1 - cy / sy };
}

function drawPitch(ctx: CanvasRenderingContext2D, canvas: HTMLCanvasElement): void {
  ctx.fillStyle = "#1e5c2f";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#e8e8e8";
  const [x0, y0] = fieldToCanvas(canvas, { x: -15, y: 10 });
  const [x1, y1] = fieldToCanvas(canvas, { x: 15, y: -10 });
  ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);
  const [mx0, my0] = fieldToCanvas(canvas, { x: 0, y: 10 });
  const [, my1] = fieldToCanvas(canvas, { x: 0, y: -10 });
  ctx.beginPath();
  ctx.moveTo(mx0, my0);
  ctx.lineTo(mx0, my1);
  ctx.stroke();
}

function startFormationEditor(gateway: GatewayClient, session: EditorSession): void {
  const canvas = document.getElementById("field") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const status = document.getElementById("formation-status")!;

  // A small seed draft; edits replace pairs wholesale through the textarea.
  const pairs: TrainingPair[] = [
    { ball: { x: -12, y: 0 }, targets: seedTargets(-6) },
    { ball: { x: 0, y: 7 }, targets: seedTargets(0) },
    { ball: { x: 12, y: -7 }, targets: seedTargets(6) },
  ];
  const editor = new FormationEditor(gateway);
  editor.setPairs(pairs);

  function seedTargets(shift: number): Marker[] {
    return Array.from({ length: 11 }, (_, i) => ({ x: shift + (i % 4) * 1.5 - 2, y: (i % 3) * 3 - 3 }));
  }

  function render(): void {
    drawPitch(ctx, canvas);
    for (const pair of editor.pairs) {
      const [bx, by] = fieldToCanvas(canvas, pair.ball);
      ctx.fillStyle = "#ffd34d";
      ctx.beginPath();
      ctx.arc(bx, by, 4, 0, 2 * Math.PI);
      ctx.fill();
    }
    if (editor.preview.enabled) {
      const [hx, hy] = fieldToCanvas(canvas, editor.preview.ball);
      ctx.fillStyle = "#ffffff";
      ctx.beginPath();
      ctx.arc(hx, hy, 6, 0, 2 * Math.PI);
      ctx.fill();
      editor.preview.markers.forEach((m, i) => {
        const [mx, my] = fieldToCanvas(canvas, m);
        ctx.fillStyle = "#64b5ff";
        ctx.beginPath();
        ctx.arc(mx, my, 5, 0, 2 * Math.PI);
        ctx.fill();
        ctx.fillStyle = "#0b2239";
        ctx.fillText(String(i + 1), mx - 3, my + 3);
      });
      status.textContent = `ball (${fmtCoord(editor.preview.ball.x)}, ${fmtCoord(editor.preview.ball.y)})`;
    } else {
      status.textContent = `preview disabled: ${editor.preview.reason}`;
    }
  }

  let dragging = false;
  canvas.addEventListener("mousedown", () => (dragging = true));
  window.addEventListener("mouseup", () => (dragging = false));
  canvas.addEventListener("mousemove", (ev) => {
    if (!dragging) return;
    const rect = canvas.getBoundingClientRect();
    const ball = canvasToField(canvas, ev.clientX - rect.left, ev.clientY - rect.top);
    session.dispatch(() => editor.dragBall(ball).then(render));
  });

  (document.getElementById("save-formation") as HTMLButtonElement).addEventListener("click", () => {
    const name = (document.getElementById("formation-name") as HTMLInputElement).value || "draft";
    session.dispatch(async () => {
      const doc = strategicMapSource(editor.pairs);
      session.upsertFormation(name, doc);
      status.textContent = `stored draft ${name} locally (full documents save via PUT /formations)`;
    });
  });

  session.dispatch(() => editor.dragBall({ x: 0, y: 0 }).then(render));
}

function startSetplayDesigner(gateway: GatewayClient, session: EditorSession): void {
  const source = document.getElementById("setplay-source") as HTMLTextAreaElement;
  const diagnostics = document.getElementById("setplay-diagnostics")!;
  const designer = new SetplayDesigner(gateway, source.value);

  async function refresh(): Promise<void> {
    source.value = designer.source;
    const byStep = await designer.refreshDiagnostics();
    diagnostics.textContent = designer.diagnostics.length
      ? [...byStep.entries()]
          .map(([step, list]) => `${step < 0 ? "document" : `step ${step}`}: ${list.map((d) => d.code).join(", ")}`)
          .join("\n")
      : "no diagnostics";
  }

  (document.getElementById("add-step") as HTMLButtonElement).addEventListener("click", () =>
    session.dispatch(async () => {
      const last = designer.graph.steps.at(-1);
      designer.addStep(last ? last.id : 0);
      await refresh();
    }),
  );
  (document.getElementById("undo") as HTMLButtonElement).addEventListener("click", () =>
    session.dispatch(async () => {
      designer.undo();
      await refresh();
    }),
  );
  (document.getElementById("fmt") as HTMLButtonElement).addEventListener("click", () =>
    session.dispatch(async () => {
      designer.source = source.value;
      await designer.canonicalize();
      await refresh();
    }),
  );
  source.addEventListener("change", () =>
    session.dispatch(async () => {
      designer.source = source.value;
      await refresh();
    }),
  );
  session.dispatch(refresh);
}

function startTrialRunner(gateway: GatewayClient, session: EditorSession): void {
  const runner = new TrialRunner(gateway, 250);
  const historyEl = document.getElementById("trial-history")!;
  const progressEl = document.getElementById("trial-progress") as HTMLProgressElement;

  function renderHistory(): void {
    historyEl.textContent = runner.renderedRates().join("\n");
    session.project.trialHistory = runner.history;
  }

  (document.getElementById("run-trials") as HTMLButtonElement).addEventListener("click", () => {
    const setplay = (document.getElementById("setplay-source") as HTMLTextAreaElement).value;
    const scenario = (document.getElementById("scenario-source") as HTMLTextAreaElement).value;
    const n = parseInt((document.getElementById("trial-n") as HTMLInputElement).value, 10) || 10;
    const seed = parseInt((document.getElementById("trial-seed") as HTMLInputElement).value, 10) || 1;
    session.dispatch(async () => {
      const row = await runner.run("draft", setplay, scenario, n, seed, (p) => {
        progressEl.value = p;
        renderHistory();
      });
      renderHistory();
      if (row.report) startPlayback(row.jobId);
    });
  });
}

function startPlayback(jobId: number): void {
  const canvas = document.getElementById("viewer") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const ws = new WebSocket(`${GATEWAY_URL.replace("http", "ws")}/live/${jobId}`);
  ws.onmessage = (ev) => {
    const frame = parseCycleLine(String(ev.data));
    if (!frame) return;
    drawPitch(ctx, canvas);
    ctx.fillStyle = "#ffffff";
    const [bx, by] = fieldToCanvas(canvas, frame.ball);
    ctx.beginPath();
    ctx.arc(bx, by, 3, 0, 2 * Math.PI);
    ctx.fill();
    for (const agent of frame.agents) {
      ctx.fillStyle = agent.id.startsWith("L") ? "#64b5ff" : "#ff8a65";
      const [ax, ay] = fieldToCanvas(canvas, agent);
      ctx.beginPath();
      ctx.arc(ax, ay, 4, 0, 2 * Math.PI);
      ctx.fill();
    }
    (document.getElementById("viewer-status")!).textContent =
      `cycle ${frame.cycle} ${frame.playMode} ${frame.score[0]}-${frame.score[1]}`;
  };
}

export function start(): void {
  const gateway = new GatewayClient(new FetchTransport(GATEWAY_URL));
  const session = new EditorSession();
  for (const name of ["formationEditor", "setplayDesigner", "matchViewer", "trialRunner"] as const) {
    const button = document.getElementById(`view-${name}`);
    if (button) button.addEventListener("click", () => session.switchView(name));
  }
  startFormationEditor(gateway, session);
  startSetplayDesigner(gateway, session);
  startTrialRunner(gateway, session);
}

if (typeof document !== "undefined" && document.getElementById("field")) {
  start();
}
