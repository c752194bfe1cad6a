import { api, JobPayload } from './api';

export interface PollOptions {
  /** Initial delay between polls in milliseconds. */
  intervalMs?: number;
  /** Multiplier applied to the delay after each poll. */
  backoff?: number;
  /** Upper bound on the delay. */
  maxIntervalMs?: number;
  /** Called with each intermediate status. */
  onUpdate?: (job: JobPayload) => void;
}

const sleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/**
 * Poll a job until it reaches a terminal state. Resolves with the final
 * payload for both `done` and `failed`; the caller decides how to present
 * a failure. Polling starts at 1s and backs off gently so long analyses
 * don't hammer the service.
 */
export async function pollJob(jobId: string, opts: PollOptions = {}): Promise<JobPayload> {
  const backoff = opts.backoff ?? 1.5;
  const max = opts.maxIntervalMs ?? 10_000;
  let delay = opts.intervalMs ?? 1000;
  for (;;) {
    await sleep(delay);
    const job = await api.jobStatus(jobId);
    opts.onUpdate?.(job);
    if (job.state === 'done' || job.state === 'failed') return job;
    delay = Math.min(delay * backoff, max);
  }
}
