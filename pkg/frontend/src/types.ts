export type Answer = "pass" | "fail";

export interface ReviewTask {
  task_id: string;
  poem_id: string;
  method_id: string;
  candidate_text: string;
  applicable_tests: string[];
  image_ref: string | null;
}

export interface VerdictSubmission {
  task_id: string;
  annotator_id: string;
  answers: Record<string, Answer>;
  ocr_error: boolean;
}

export interface ReviewViewState {
  task: ReviewTask | null;
  answers: Record<string, Answer>;
  ocrError: boolean;
  showWhitespace: boolean;
  status: "idle" | "submitting" | "error" | "done";
  /** test ids the server (or local validation) flagged on the last attempt */
  highlighted: string[];
  message: string;
}

export function freshState(task: ReviewTask | null): ReviewViewState {
  return {
    task,
    answers: {},
    ocrError: false,
    showWhitespace: true,
    status: task ? "idle" : "done",
    highlighted: [],
    message: "",
  };
}
