/** Validation parity: the UI must be unable to submit any record the
 * service's validator would reject. The mock service validator below is an
 * independent translation of the server's rules; for every unit test in
 * {answered, missing, not_applicable} states the UI's submit gate must
 * agree with it exactly. */

import { describe, expect, it } from "vitest";
import { render } from "../src/render.js";
import { UNIT_TESTS } from "../src/taxonomy.js";
import { freshState, type ReviewTask } from "../src/types.js";
import { canSubmit, validateSubmission } from "../src/validate.js";

const ALL_IDS = UNIT_TESTS.map((t) => t.id);

/** Mock of the service-side validator (independent translation). */
function mockServiceAccepts(
  applicable: string[],
  answers: Record<string, string>,
): boolean {
  const known = new Set(ALL_IDS);
  const app = new Set(applicable);
  for (const [id, ans] of Object.entries(answers)) {
    if (!known.has(id)) return false;
    if (!app.has(id)) return false;
    if (ans !== "pass" && ans !== "fail") return false;
  }
  for (const id of app) {
    if (!(id in answers)) return false;
  }
  return true;
}

function makeTask(applicable: string[]): ReviewTask {
  return {
    task_id: "p::m",
    poem_id: "p",
    method_id: "m",
    candidate_text: "  a line\nanother",
    applicable_tests: applicable,
    image_ref: null,
  };
}

function submitButtonEnabled(task: ReviewTask, answers: Record<string, "pass" | "fail">): boolean {
  const root = document.createElement("div");
  const state = freshState(task);
  state.answers = answers;
  render(root, state, null, {
    onAnswer: () => {},
    onOcrToggle: () => {},
    onWhitespaceToggle: () => {},
    onSubmit: () => {},
    onRetryImage: () => {},
  });
  const btn = root.querySelector<HTMLButtonElement>("#submit");
  if (btn === null) throw new Error("no submit button rendered");
  return !btn.disabled;
}

type CaseState = "answered" | "missing" | "not_applicable";
const STATES: CaseState[] = ["answered", "missing", "not_applicable"];

function buildCase(testId: string, state: CaseState) {
  const applicable = state === "not_applicable" ? ALL_IDS.filter((t) => t !== testId) : ALL_IDS;
  const answers: Record<string, "pass" | "fail"> = {};
  for (const id of applicable) {
    if (!(state === "missing" && id === testId)) answers[id] = "pass";
  }
  return { applicable, answers };
}

describe("UI/service validation parity (10 tests x 3 states)", () => {
  for (const test of UNIT_TESTS) {
    for (const state of STATES) {
      it(`test ${test.id} ${state}`, () => {
        const { applicable, answers } = buildCase(test.id, state);
        const serviceOk = mockServiceAccepts(applicable, answers);
        expect(canSubmit(applicable, answers)).toBe(serviceOk);
        expect(submitButtonEnabled(makeTask(applicable), answers)).toBe(serviceOk);
        // sanity on the expected direction of each state
        expect(serviceOk).toBe(state !== "missing");
      });
    }
  }

  it("answer for a non-applicable test is rejected on both sides", () => {
    const applicable = ALL_IDS.filter((t) => t !== "3a");
    const answers: Record<string, "pass" | "fail"> = {};
    for (const id of ALL_IDS) answers[id] = "pass"; // includes the inapplicable 3a
    expect(mockServiceAccepts(applicable, answers)).toBe(false);
    expect(canSubmit(applicable, answers)).toBe(false);
  });

  it("unknown test id is rejected on both sides", () => {
    const answers = { "1": "pass", "9z": "pass" } as Record<string, "pass" | "fail">;
    expect(mockServiceAccepts(["1"], answers)).toBe(false);
    expect(canSubmit(["1"], answers)).toBe(false);
  });

  it("non pass/fail value is rejected on both sides", () => {
    const answers = { "1": "maybe" } as unknown as Record<string, string>;
    expect(mockServiceAccepts(["1"], answers)).toBe(false);
    expect(canSubmit(["1"], answers)).toBe(false);
  });

  it("problems name the offending tests", () => {
    const problems = validateSubmission(["1", "2a"], { "1": "pass" });
    expect(problems).toEqual([{ testId: "2a", reason: "missing_answer" }]);
  });
});

describe("rendering contracts", () => {
  it("hides checklist sections with no applicable tests", () => {
    const root = document.createElement("div");
    render(root, freshState(makeTask(["1"])), null, {
      onAnswer: () => {},
      onOcrToggle: () => {},
      onWhitespaceToggle: () => {},
      onSubmit: () => {},
      onRetryImage: () => {},
    });
    expect(root.querySelectorAll("section[data-tier]")).toHaveLength(1);
    expect(root.querySelector('section[data-tier="exact"]')).toBeNull();
  });

  it("renders internal runs as one visible glyph per space", () => {
    const root = document.createElement("div");
    const task = makeTask(["1"]);
    task.candidate_text = "word   word";
    render(root, freshState(task), null, {
      onAnswer: () => {},
      onOcrToggle: () => {},
      onWhitespaceToggle: () => {},
      onSubmit: () => {},
      onRetryImage: () => {},
    });
    const run = root.querySelector<HTMLElement>('.ws-space[data-spaces="3"]');
    expect(run?.textContent).toBe("···");
  });

  it("whitespace toggle keeps displayed widths identical", () => {
    const task = makeTask(["1"]);
    task.candidate_text = "  one  two\n\nthree";
    for (const line of task.candidate_text.split("\n")) {
      for (const show of [true, false]) {
        const root = document.createElement("div");
        const state = freshState(task);
        state.showWhitespace = show;
        render(root, state, null, {
          onAnswer: () => {},
          onOcrToggle: () => {},
          onWhitespaceToggle: () => {},
          onSubmit: () => {},
          onRetryImage: () => {},
        });
        const lines = [...root.querySelectorAll(".line")].map((el) =>
          (el.textContent ?? "").replace(/¶$/, "").replace(/·/g, " "),
        );
        expect(lines).toContain(line);
      }
    }
  });
});
