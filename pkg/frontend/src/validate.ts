/** Client-side submission validation, mirroring the service's validator:
 * every answer key must be a known, applicable test with value pass/fail,
 * and every applicable test must be answered. The UI must never POST a
 * record this function rejects. */

import { TEST_BY_ID } from "./taxonomy.js";

export interface ValidationProblem {
  testId: string | null;
  reason: "unknown_test" | "not_applicable" | "bad_value" | "missing_answer";
}

export function validateSubmission(
  applicableTests: readonly string[],
  answers: Record<string, string>,
): ValidationProblem[] {
  const problems: ValidationProblem[] = [];
  const applicable = new Set(applicableTests);
  for (const [testId, answer] of Object.entries(answers)) {
    if (!TEST_BY_ID.has(testId)) {
      problems.push({ testId, reason: "unknown_test" });
      continue;
    }
    if (!applicable.has(testId)) {
      problems.push({ testId, reason: "not_applicable" });
    } else if (answer !== "pass" && answer !== "fail") {
      problems.push({ testId, reason: "bad_value" });
    }
  }
  for (const testId of [...applicable].sort()) {
    if (!(testId in answers)) {
      problems.push({ testId, reason: "missing_answer" });
    }
  }
  return problems;
}

export function canSubmit(
  applicableTests: readonly string[],
  answers: Record<string, string>,
): boolean {
  return validateSubmission(applicableTests, answers).length === 0;
}
