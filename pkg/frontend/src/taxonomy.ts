/** Unit-test taxonomy, mirroring the review service's schema exactly. */

export type Tier = "presence" | "fuzzy" | "exact";
export type WispType = "LINE_BREAKS" | "PREFIX" | "INTERNAL" | "VERTICAL";

export interface UnitTest {
  id: string;
  tier: Tier;
  wispType: WispType;
  question: string;
}

export const UNIT_TESTS: readonly UnitTest[] = [
  {
    id: "1",
    tier: "presence",
    wispType: "LINE_BREAKS",
    question:
      "Does every line break survive — does each candidate line start and end with the same words as the corresponding truth line?",
  },
  {
    id: "2a",
    tier: "presence",
    wispType: "PREFIX",
    question: "Is every indented line in the truth also indented in the candidate?",
  },
  {
    id: "2b",
    tier: "fuzzy",
    wispType: "PREFIX",
    question:
      "Do the candidate's indents keep the same relative ordering (deeper stays deeper) as the truth's?",
  },
  {
    id: "2c",
    tier: "exact",
    wispType: "PREFIX",
    question: "Does every indent match the truth's depth within tolerance (±1 space)?",
  },
  {
    id: "3a",
    tier: "presence",
    wispType: "INTERNAL",
    question: "Is every mid-line gap (2+ spaces) in the truth present in the candidate?",
  },
  {
    id: "3b",
    tier: "fuzzy",
    wispType: "INTERNAL",
    question: "Do the candidate's mid-line gaps keep the same relative ordering as the truth's?",
  },
  {
    id: "3c",
    tier: "exact",
    wispType: "INTERNAL",
    question: "Does every mid-line gap match the truth's width within tolerance (±1 space)?",
  },
  {
    id: "4a",
    tier: "presence",
    wispType: "VERTICAL",
    question: "Is every blank-line gap in the truth present in the candidate?",
  },
  {
    id: "4b",
    tier: "fuzzy",
    wispType: "VERTICAL",
    question: "Do the candidate's blank-line gaps keep the same relative ordering as the truth's?",
  },
  {
    id: "4c",
    tier: "exact",
    wispType: "VERTICAL",
    question: "Does every blank-line gap have exactly the truth's number of blank lines (no tolerance)?",
  },
];

export const TIERS: readonly Tier[] = ["presence", "fuzzy", "exact"];

export const TEST_BY_ID: ReadonlyMap<string, UnitTest> = new Map(
  UNIT_TESTS.map((t) => [t.id, t]),
);
