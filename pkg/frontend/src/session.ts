/**
 * Designer project and editor session state.
 *
 * A project is named formation drafts, named setplay sources, and the
 * trial history. The session tracks the active view, the selection and the
 * dirty flag; all state changes flow through a single ordered action queue
 * so concurrent gateway responses can never interleave mid-mutation.
 */

import { TrialHistoryRow } from "./trialRunner.js";

export type ViewName = "formationEditor" | "setplayDesigner" | "matchViewer" | "trialRunner";

export interface DesignerProject {
  formations: Map<string, string>; // name -> document source
  setplays: Map<string, string>; // name -> setplay source
  trialHistory: TrialHistoryRow[];
}

export function emptyProject(): DesignerProject {
  return { formations: new Map(), setplays: new Map(), trialHistory: [] };
}

export class EditorSession {
  activeView: ViewName = "formationEditor";
  selection = "";
  dirty = false;
  project: DesignerProject = emptyProject();

  private queue: Promise<void> = Promise.resolve();

  switchView(view: ViewName): void {
    this.activeView = view;
  }

  select(name: string): void {
    this.selection = name;
  }

  /** Enqueue an action; actions run strictly in submission order. */
  dispatch(action: () => void | Promise<void>): Promise<void> {
    this.queue = this.queue.then(() => Promise.resolve(action())).catch((err) => {
      console.error("action failed:", err);
    });
    return this.queue;
  }

  upsertFormation(name: string, source: string): void {
    if (this.project.setplays.has(name)) {
      throw new Error(`name ${name} already used by a setplay`);
    }
    this.project.formations.set(name, source);
    this.dirty = true;
  }

  upsertSetplay(name: string, source: string): void {
    if (this.project.formations.has(name)) {
      throw new Error(`name ${name} already used by a formation`);
    }
    this.project.setplays.set(name, source);
    this.dirty = true;
  }
}
