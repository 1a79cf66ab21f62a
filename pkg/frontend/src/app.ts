/** Application shell: fetch → render → submit → advance loop with
 * keyboard shortcuts. Talks to the service only through ApiClient. */

import { ApiClient, ApiError } from "./api.js";
import { render } from "./render.js";
import { UNIT_TESTS } from "./taxonomy.js";
import { freshState, type Answer, type ReviewViewState } from "./types.js";
import { canSubmit, validateSubmission } from "./validate.js";

export class App {
  state: ReviewViewState = freshState(null);
  /** Resolves when the in-flight submit/load settles; tests await this. */
  pending: Promise<void> = Promise.resolve();
  private focusedTest: string | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private annotator: string,
  ) {
    root.ownerDocument.addEventListener("keydown", (ev) => this.onKey(ev as KeyboardEvent));
  }

  async start(): Promise<void> {
    await this.loadNext();
  }

  private async loadNext(): Promise<void> {
    const task = await this.api.nextTask(this.annotator);
    this.state = freshState(task);
    this.focusedTest = task?.applicable_tests[0] ?? null;
    this.render();
  }

  private render(): void {
    const task = this.state.task;
    const imageUrl = task && task.image_ref !== null ? this.api.imageUrl(task.poem_id) : null;
    render(this.root, this.state, imageUrl, {
      onAnswer: (testId, answer) => this.setAnswer(testId, answer),
      onOcrToggle: (checked) => {
        this.state.ocrError = checked;
        this.render();
      },
      onWhitespaceToggle: (checked) => {
        this.state.showWhitespace = checked;
        this.render();
      },
      onSubmit: () => {
        this.pending = this.submit();
      },
      onRetryImage: () => this.render(),
    });
  }

  setAnswer(testId: string, answer: Answer): void {
    if (!this.state.task?.applicable_tests.includes(testId)) return;
    this.state.answers[testId] = answer;
    this.state.highlighted = this.state.highlighted.filter((t) => t !== testId);
    this.focusedTest = testId;
    this.render();
  }

  async submit(): Promise<void> {
    const task = this.state.task;
    if (task === null || this.state.status === "submitting") return;
    const problems = validateSubmission(task.applicable_tests, this.state.answers);
    if (problems.length > 0) {
      // unreachable through the UI (submit is disabled), kept as a guard
      this.state.highlighted = problems.flatMap((p) => (p.testId ? [p.testId] : []));
      this.state.status = "error";
      this.state.message = "Answer every listed test before submitting.";
      this.render();
      return;
    }
    this.state.status = "submitting";
    this.state.message = "";
    this.render();
    try {
      await this.api.submitVerdict({
        task_id: task.task_id,
        annotator_id: this.annotator,
        answers: this.state.answers,
        ocr_error: this.state.ocrError,
      });
      await this.loadNext();
    } catch (err) {
      this.state.status = "error";
      if (err instanceof ApiError) {
        // server-side validation: highlight the tests it names, keep answers
        this.state.highlighted = UNIT_TESTS.filter((t) =>
          err.message.includes(`test ${t.id}`),
        ).map((t) => t.id);
        this.state.message = `Rejected by server: ${err.message}`;
      } else {
        this.state.message = "Network failure — your answers are kept. Press Enter to retry.";
      }
      this.render();
    }
  }

  private onKey(ev: KeyboardEvent): void {
    const task = this.state.task;
    if (task === null) return;
    const key = ev.key.toLowerCase();
    if (key >= "0" && key <= "9") {
      const row = this.root.querySelector<HTMLElement>(`.test-row[data-shortcut="${key}"]`);
      if (row?.dataset.test) {
        this.focusedTest = row.dataset.test;
      }
    } else if ((key === "p" || key === "f") && this.focusedTest !== null) {
      this.setAnswer(this.focusedTest, key === "p" ? "pass" : "fail");
    } else if (key === "o") {
      this.state.ocrError = !this.state.ocrError;
      this.render();
    } else if (key === "w") {
      this.state.showWhitespace = !this.state.showWhitespace;
      this.render();
    } else if (key === "enter") {
      if (canSubmit(task.applicable_tests, this.state.answers)) {
        this.pending = this.submit();
      }
    }
  }
}

export function boot(doc: Document): App {
  const root = doc.getElementById("app");
  if (root === null) throw new Error("missing #app element");
  const annotator =
    new URL(doc.location.href).searchParams.get("annotator") ??
    window.prompt("Annotator id?") ??
    "anonymous";
  const app = new App(root, new ApiClient(""), annotator);
  void app.start();
  return app;
}
