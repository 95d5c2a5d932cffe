/**
 * Setplay designer: a node graph over the setplay language.
 *
 * Steps are nodes; transitions are edges (finish/abort edges point at
 * terminal pseudo-nodes). Every mutation regenerates the S-expression
 * source; the gateway's validator supplies diagnostics which the view
 * attaches to the affected nodes; the gateway's formatter is the only
 * canonicalizer. Undo restores the prior source byte-exactly.
 */

import { Diagnostic, GatewayClient } from "./gateway.js";
import { Form, keyword, parseOne, sublists, dumps, fmtCoord } from "./sexpr.js";

export interface GraphTransition {
  kind: "next" | "finish" | "abort";
  target?: number;
  cond: string; // condition source text
}

export interface GraphStep {
  id: number;
  waitMin: number;
  waitMax: number;
  condition: string;
  directives: { role: string; action: string }[];
  transitions: GraphTransition[];
}

export interface SetplayGraph {
  name: string;
  id: number;
  players: string[];
  activation: string;
  abort: string;
  steps: GraphStep[];
}

export function graphToSource(graph: SetplayGraph): string {
  const lines = [
    `(setplay :name ${graph.name} :id ${graph.id} :players (${graph.players.join(" ")})`,
    `  :activation ${graph.activation}`,
    `  :abort ${graph.abort}`,
  ];
  for (const step of graph.steps) {
    const directives = step.directives.map((d) => `(${d.role} ${d.action})`).join(" ");
    const transitions = step.transitions
      .map((t) =>
        t.kind === "next" ? `(next :to ${t.target} :cond ${t.cond})` : `(${t.kind} :cond ${t.cond})`,
      )
      .join("\n                  ");
    lines.push(
      `  (step :id ${step.id} :wait (${fmtCoord(step.waitMin)} ${fmtCoord(step.waitMax)})` +
        ` :condition ${step.condition}\n` +
        `    :directives (${directives})\n` +
        `    :transitions (${transitions}))`,
    );
  }
  return lines.join("\n") + ")\n";
}

export function sourceToGraph(source: string): SetplayGraph {
  const form = parseOne(source) as Form[];
  if (form[0] !== "setplay") throw new Error("not a setplay document");
  const steps: GraphStep[] = sublists(form, "step").map((stepForm) => {
    const wait = keyword(stepForm, "wait") as Form[];
    const directives = ((keyword(stepForm, "directives") as Form[]) ?? []).map((d) => {
      const pair = d as Form[];
      return { role: String(pair[0]), action: dumps(pair[1]) };
    });
    const transitions = ((keyword(stepForm, "transitions") as Form[]) ?? []).map((t) => {
      const tf = t as Form[];
      const kind = String(tf[0]) as GraphTransition["kind"];
      return {
        kind,
        target: kind === "next" ? Number(keyword(tf, "to")) : undefined,
        cond: dumps(keyword(tf, "cond") ?? ["true"]),
      };
    });
    return {
      id: Number(keyword(stepForm, "id")),
      waitMin: Number(wait[0]),
      waitMax: Number(wait[1]),
      condition: dumps(keyword(stepForm, "condition") ?? ["true"]),
      directives,
      transitions,
    };
  });
  return {
    name: String(keyword(form, "name")),
    id: Number(keyword(form, "id")),
    players: (keyword(form, "players") as Form[]).map(String),
    activation: dumps(keyword(form, "activation") ?? ["true"]),
    abort: dumps(keyword(form, "abort") ?? ["false"]),
    steps,
  };
}

/** Diagnostics keyed to the step they concern (-1: whole document). */
export function diagnosticsByStep(diagnostics: Diagnostic[]): Map<number, Diagnostic[]> {
  const out = new Map<number, Diagnostic[]>();
  for (const d of diagnostics) {
    const m = d.message.match(/step (\d+)/);
    const key = m ? parseInt(m[1], 10) : -1;
    if (!out.has(key)) out.set(key, []);
    out.get(key)!.push(d);
  }
  return out;
}

export class SetplayDesigner {
  source: string;
  diagnostics: Diagnostic[] = [];
  private undoStack: string[] = [];

  constructor(private readonly gateway: GatewayClient, initialSource: string) {
    this.source = initialSource;
  }

  get graph(): SetplayGraph {
    return sourceToGraph(this.source);
  }

  /** Apply a graph mutation; the new source is regenerated from the graph. */
  private commit(mutate: (graph: SetplayGraph) => void): void {
    this.undoStack.push(this.source);
    const graph = this.graph;
    mutate(graph);
    this.source = graphToSource(graph);
  }

  addStep(afterId: number): number {
    let newId = 0;
    this.commit((graph) => {
      newId = Math.max(...graph.steps.map((s) => s.id)) + 1;
      graph.steps.push({
        id: newId,
        waitMin: 0,
        waitMax: 2,
        condition: "(true)",
        directives: [],
        transitions: [{ kind: "finish", cond: "(true)" }],
      });
      const anchor = graph.steps.find((s) => s.id === afterId);
      if (anchor) anchor.transitions.unshift({ kind: "next", target: newId, cond: "(true)" });
    });
    return newId;
  }

  removeStep(stepId: number): void {
    this.commit((graph) => {
      graph.steps = graph.steps.filter((s) => s.id !== stepId);
      // Inbound transitions are left dangling on purpose: the validator
      // reports them on the source nodes, mirroring manual editing.
    });
  }

  connect(fromId: number, toId: number, cond = "(true)"): void {
    this.commit((graph) => {
      const from = graph.steps.find((s) => s.id === fromId);
      if (!from) throw new Error(`no step ${fromId}`);
      from.transitions.unshift({ kind: "next", target: toId, cond });
    });
  }

  setCondition(stepId: number, conditionSource: string): void {
    this.commit((graph) => {
      const step = graph.steps.find((s) => s.id === stepId);
      if (!step) throw new Error(`no step ${stepId}`);
      step.condition = conditionSource;
    });
  }

  setDirectives(stepId: number, directives: { role: string; action: string }[]): void {
    this.commit((graph) => {
      const step = graph.steps.find((s) => s.id === stepId);
      if (!step) throw new Error(`no step ${stepId}`);
      step.directives = directives;
    });
  }

  undo(): boolean {
    const prior = this.undoStack.pop();
    if (prior === undefined) return false;
    this.source = prior;
    return true;
  }

  async refreshDiagnostics(): Promise<Map<number, Diagnostic[]>> {
    this.diagnostics = await this.gateway.validateSetplay(this.source);
    return diagnosticsByStep(this.diagnostics);
  }

  async canonicalize(): Promise<void> {
    this.undoStack.push(this.source);
    this.source = await this.gateway.formatSetplay(this.source);
  }
}
