/** DOM rendering for a review task: poem image beside the candidate text
 * with visible-whitespace glyphs, and the unit-test checklist grouped by
 * tier. Pure view layer — all state changes go through the handlers. */

import { TIERS, UNIT_TESTS } from "./taxonomy.js";
import type { ReviewViewState } from "./types.js";
import { canSubmit } from "./validate.js";

export interface Handlers {
  onAnswer(testId: string, answer: "pass" | "fail"): void;
  onOcrToggle(checked: boolean): void;
  onWhitespaceToggle(checked: boolean): void;
  onSubmit(): void;
  onRetryImage(): void;
}

/** Render candidate text into a <pre>. In visible-whitespace mode each
 * space becomes a middle-dot glyph, each line break gains a pilcrow, and
 * blank lines are shaded. Glyphs are presentational only: the submitted
 * bytes come from the task record, and every substitution is one glyph per
 * character so monospace column widths are unchanged. */
export function renderCandidate(doc: Document, text: string, showWhitespace: boolean): HTMLElement {
  const pre = doc.createElement("pre");
  pre.className = "candidate";
  const lines = text.split("\n");
  lines.forEach((line, i) => {
    const lineEl = doc.createElement("span");
    lineEl.className = line.trim() === "" ? "line ws-blank" : "line";
    for (const run of line.split(/( +)/)) {
      if (run === "") continue;
      const span = doc.createElement("span");
      if (run.startsWith(" ")) {
        span.className = "ws-space";
        span.textContent = showWhitespace ? "·".repeat(run.length) : run;
        span.dataset.spaces = String(run.length);
      } else {
        span.textContent = run;
      }
      lineEl.appendChild(span);
    }
    if (i < lines.length - 1 && showWhitespace) {
      const nl = doc.createElement("span");
      nl.className = "ws-newline";
      nl.textContent = "¶";
      lineEl.appendChild(nl);
    }
    pre.appendChild(lineEl);
    if (i < lines.length - 1) pre.appendChild(doc.createTextNode("\n"));
  });
  return pre;
}

export function render(
  root: HTMLElement,
  state: ReviewViewState,
  imageUrl: string | null,
  handlers: Handlers,
): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  const task = state.task;
  if (task === null) {
    const done = doc.createElement("p");
    done.className = "all-done";
    done.textContent = "No tasks left for you. Thank you!";
    root.appendChild(done);
    return;
  }

  const header = doc.createElement("header");
  header.textContent = `Poem ${task.poem_id} — method ${task.method_id}`;
  root.appendChild(header);

  const panes = doc.createElement("div");
  panes.className = "panes";

  const imagePane = doc.createElement("div");
  imagePane.className = "image-pane";
  if (imageUrl !== null && task.image_ref !== null) {
    const img = doc.createElement("img");
    img.src = imageUrl;
    img.alt = `ground-truth image for poem ${task.poem_id}`;
    img.addEventListener("error", () => {
      imagePane.textContent = "";
      const placeholder = doc.createElement("div");
      placeholder.className = "image-placeholder";
      placeholder.textContent = "Image failed to load.";
      const retry = doc.createElement("button");
      retry.textContent = "Retry";
      retry.addEventListener("click", () => handlers.onRetryImage());
      placeholder.appendChild(retry);
      imagePane.appendChild(placeholder);
    });
    imagePane.appendChild(img);
  } else {
    const placeholder = doc.createElement("div");
    placeholder.className = "image-placeholder";
    placeholder.textContent = "No ground-truth image for this poem.";
    imagePane.appendChild(placeholder);
  }
  panes.appendChild(imagePane);

  const textPane = doc.createElement("div");
  textPane.className = "text-pane";
  textPane.appendChild(renderCandidate(doc, task.candidate_text, state.showWhitespace));
  panes.appendChild(textPane);
  root.appendChild(panes);

  const wsLabel = doc.createElement("label");
  const wsToggle = doc.createElement("input");
  wsToggle.type = "checkbox";
  wsToggle.id = "ws-toggle";
  wsToggle.checked = state.showWhitespace;
  wsToggle.addEventListener("change", () => handlers.onWhitespaceToggle(wsToggle.checked));
  wsLabel.appendChild(wsToggle);
  wsLabel.appendChild(doc.createTextNode(" show whitespace (w)"));
  root.appendChild(wsLabel);

  const applicable = new Set(task.applicable_tests);
  const checklist = doc.createElement("div");
  checklist.className = "checklist";
  let shortcut = 0;
  for (const tier of TIERS) {
    const tests = UNIT_TESTS.filter((t) => t.tier === tier && applicable.has(t.id));
    if (tests.length === 0) continue; // whole tier hidden when nothing applies
    const section = doc.createElement("section");
    section.dataset.tier = tier;
    const h = doc.createElement("h2");
    h.textContent = tier;
    section.appendChild(h);
    for (const test of tests) {
      shortcut += 1;
      const row = doc.createElement("div");
      row.className = "test-row";
      row.dataset.test = test.id;
      row.dataset.shortcut = String(shortcut % 10);
      if (state.highlighted.includes(test.id)) row.classList.add("problem");
      const label = doc.createElement("span");
      label.className = "question";
      label.textContent = `[${shortcut % 10}] ${test.wispType} — ${test.question}`;
      row.appendChild(label);
      for (const answer of ["pass", "fail"] as const) {
        const btn = doc.createElement("button");
        btn.dataset.test = test.id;
        btn.dataset.answer = answer;
        btn.textContent = answer;
        if (state.answers[test.id] === answer) btn.classList.add("selected");
        btn.addEventListener("click", () => handlers.onAnswer(test.id, answer));
        row.appendChild(btn);
      }
      section.appendChild(row);
    }
    checklist.appendChild(section);
  }
  root.appendChild(checklist);

  const ocrLabel = doc.createElement("label");
  const ocr = doc.createElement("input");
  ocr.type = "checkbox";
  ocr.id = "ocr";
  ocr.checked = state.ocrError;
  ocr.addEventListener("change", () => handlers.onOcrToggle(ocr.checked));
  ocrLabel.appendChild(ocr);
  ocrLabel.appendChild(doc.createTextNode(" OCR error in candidate (o)"));
  root.appendChild(ocrLabel);

  const submit = doc.createElement("button");
  submit.id = "submit";
  submit.textContent = state.status === "submitting" ? "Submitting…" : "Submit (Enter)";
  submit.disabled =
    state.status === "submitting" || !canSubmit(task.applicable_tests, state.answers);
  submit.addEventListener("click", () => handlers.onSubmit());
  root.appendChild(submit);

  if (state.message) {
    const msg = doc.createElement("p");
    msg.className = state.status === "error" ? "message error" : "message";
    msg.textContent = state.message;
    root.appendChild(msg);
  }
}
