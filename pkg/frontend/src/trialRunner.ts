/**
 * Trial runner: submits batches to the gateway, streams progress, and
 * appends finished reports to the project history. A canceled job leaves a
 * canceled row with no partial rate.
 */

import { GatewayClient, JobStatus, TrialReport } from "./gateway.js";

export interface TrialHistoryRow {
  jobId: number;
  setplayName: string;
  state: "running" | "done" | "error" | "canceled";
  progress: number;
  report?: TrialReport;
  error?: string;
}

export class TrialRunner {
  history: TrialHistoryRow[] = [];

  constructor(
    private readonly gateway: GatewayClient,
    private readonly pollDelayMs = 100,
    private readonly sleep: (ms: number) => Promise<void> = (ms) =>
      new Promise((resolve) => setTimeout(resolve, ms)),
  ) {}

  async run(
    setplayName: string,
    setplaySource: string,
    scenarioSource: string,
    n: number,
    seed: number,
    onProgress?: (progress: number) => void,
  ): Promise<TrialHistoryRow> {
    const jobId = await this.gateway.submitTrials(setplaySource, scenarioSource, n, seed);
    const row: TrialHistoryRow = { jobId, setplayName, state: "running", progress: 0 };
    this.history.push(row);

    let last = -1;
    for (;;) {
      const status: JobStatus = await this.gateway.jobStatus(jobId);
      row.state = status.state;
      row.progress = status.progress;
      if (status.progress !== last && onProgress) {
        onProgress(status.progress);
        last = status.progress;
      }
      if (status.state === "done") {
        row.report = status.report;
        return row;
      }
      if (status.state === "canceled") {
        row.report = undefined; // no partial rate is ever shown
        return row;
      }
      if (status.state === "error") {
        row.error = status.error;
        return row;
      }
      await this.sleep(this.pollDelayMs);
    }
  }

  async cancel(jobId: number): Promise<void> {
    await this.gateway.cancelJob(jobId);
  }

  /** Rows rendered side by side, newest last; canceled rows show no rate. */
  renderedRates(): string[] {
    return this.history.map((row) => {
      if (row.state === "canceled") return `${row.setplayName}: canceled`;
      if (row.state === "error") return `${row.setplayName}: error`;
      if (row.state === "running") return `${row.setplayName}: ${(row.progress * 100).toFixed(0)}%`;
      const r = row.report;
      if (!r) return `${row.setplayName}: done`;
      const rate = r.rate === null ? "0/0 (undefined)" : `${r.successes}/${r.trials} = ${r.rate.toFixed(3)}`;
      return `${row.setplayName}: ${rate}`;
    });
  }
}
