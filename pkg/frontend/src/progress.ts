import type { JobRecord, JobStage, StageEvent } from "./types";

export function stageLabel(stage: string): string {
  return stage.replace(/_/g, " ");
}

export const TERMINAL_STAGES: JobStage[] = ["done", "failed"];

export function isTerminal(stage: JobStage): boolean {
  return TERMINAL_STAGES.includes(stage);
}

/**
 * Display-side monotonicity guard.  The service already keeps job progress
 * non-decreasing, but concurrent polls can complete out of order; the
 * tracker pins the displayed value to the highest one seen this session.
 */
export class ProgressTracker {
  private best = 0;

  update(value: number): number {
    if (Number.isFinite(value)) {
      this.best = Math.max(this.best, Math.min(1, Math.max(0, value)));
    }
    return this.best;
  }

  get value(): number {
    return this.best;
  }
}

/** The stage a failed job was in when it died: last history entry before "failed". */
export function failedStage(job: JobRecord): string {
  const before = job.stage_history.filter((e: StageEvent) => e.stage !== "failed");
  const last = before[before.length - 1];
  return last ? last.stage : "queued";
}
