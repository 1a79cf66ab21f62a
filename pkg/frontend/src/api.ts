/** Thin client for the review service's HTTP+JSON endpoints. */

import type { ReviewTask, VerdictSubmission } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

type Fetch = typeof globalThis.fetch;

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: Fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async json(path: string, init?: RequestInit): Promise<unknown> {
    const resp = await this.fetchImpl(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = (await resp.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(detail, resp.status);
    }
    return resp.json();
  }

  async nextTask(annotator: string): Promise<ReviewTask | null> {
    const data = (await this.json(
      `/tasks/next?annotator=${encodeURIComponent(annotator)}`,
    )) as { task: ReviewTask | null };
    return data.task;
  }

  async getTask(taskId: string): Promise<ReviewTask> {
    return (await this.json(`/tasks/${encodeURIComponent(taskId)}`)) as ReviewTask;
  }

  async submitVerdict(
    submission: VerdictSubmission,
  ): Promise<{ status: string; verdict_count: number }> {
    return (await this.json("/verdicts", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(submission),
    })) as { status: string; verdict_count: number };
  }

  async progress(): Promise<Record<string, unknown>> {
    return (await this.json("/progress")) as Record<string, unknown>;
  }

  async exportLog(): Promise<string> {
    const resp = await this.fetchImpl(this.base + "/export");
    if (!resp.ok) throw new ApiError(resp.statusText, resp.status);
    return resp.text();
  }

  imageUrl(poemId: string): string {
    return `${this.base}/poems/${encodeURIComponent(poemId)}/image`;
  }
}
