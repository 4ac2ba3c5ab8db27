// Wire types for the crowd task gateway (JSON over HTTP).

export type Verdict = "yes" | "no" | "not_sure";

export interface QuestionPayload {
  question_id: string;
  existence_text: string;
  value_text: string;
}

export interface TaskPayload {
  task_id: string;
  questions: QuestionPayload[];
}

// The client never sends a confidence value: that is a server-side policy.
export interface JudgmentPayload {
  question_id: string;
  verdict: Verdict;
  value?: string;
  familiarity: number;
}

export interface StatusPayload {
  pending: number;
  collecting: number;
  resolved: number;
}

export const FAMILIARITY_MIN = 1;
export const FAMILIARITY_MAX = 7;
