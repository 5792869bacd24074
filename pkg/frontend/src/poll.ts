import { getJob } from "./api";
import { isTerminal } from "./progress";
import type { JobRecord } from "./types";

// Default gap between job polls.  Tests shrink this to keep runs fast.
export const pollConfig = { intervalMs: 2000 };

export interface PollHandle {
  stop(): void;
  /** Settles with the terminal job record; never settles after stop(). */
  done: Promise<JobRecord>;
}

/**
 * Poll a job until it reaches "done" or "failed", reporting every
 * snapshot through onUpdate.  The first poll fires immediately.
 */
export function pollJob(
  jobId: string,
  onUpdate?: (job: JobRecord) => void,
  intervalMs: number = pollConfig.intervalMs,
): PollHandle {
  let stopped = false;
  let timer: ReturnType<typeof setTimeout> | undefined;

  const done = new Promise<JobRecord>((resolve, reject) => {
    const tick = async () => {
      let job: JobRecord;
      try {
        job = await getJob(jobId);
      } catch (error) {
        if (!stopped) reject(error);
        return;
      }
      if (stopped) return;
      onUpdate?.(job);
      if (isTerminal(job.stage)) {
        resolve(job);
        return;
      }
      timer = setTimeout(tick, intervalMs);
    };
    void tick();
  });

  return {
    stop() {
      stopped = true;
      if (timer !== undefined) clearTimeout(timer);
    },
    done,
  };
}
