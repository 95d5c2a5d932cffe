import { describe, expect, it } from "vitest";

import { EditorSession, emptyProject } from "../src/session.js";

describe("editor session", () => {
  it("switches views and tracks selection", () => {
    const session = new EditorSession();
    expect(session.activeView).toBe("formationEditor");
    session.switchView("setplayDesigner");
    session.select("corner-short");
    expect(session.activeView).toBe("setplayDesigner");
    expect(session.selection).toBe("corner-short");
  });

  it("runs dispatched actions strictly in order", async () => {
    const session = new EditorSession();
    const order: number[] = [];
    session.dispatch(async () => {
      await new Promise((resolve) => setTimeout(resolve, 30));
      order.push(1);
    });
    session.dispatch(() => {
      order.push(2);
    });
    await session.dispatch(async () => {
      order.push(3);
    });
    expect(order).toEqual([1, 2, 3]);
  });

  it("keeps project names unique across drafts", () => {
    const session = new EditorSession();
    session.upsertSetplay("corner", "(setplay ...)");
    expect(() => session.upsertSetplay("corner", "(setplay v2)")).not.toThrow();
    expect(() => session.upsertFormation("corner", "(formation ...)")).toThrow(/already used/);
    expect(session.dirty).toBe(true);
  });

  it("starts from an empty project", () => {
    const project = emptyProject();
    expect(project.formations.size).toBe(0);
    expect(project.setplays.size).toBe(0);
    expect(project.trialHistory).toEqual([]);
  });
});
