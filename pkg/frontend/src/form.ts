import {
  FAMILIARITY_MAX,
  FAMILIARITY_MIN,
  type JudgmentPayload,
  type TaskPayload,
  type Verdict,
} from "./protocol.js";

/** Per-question form state: verdict, free-text value, familiarity score. */
export interface QuestionForm {
  verdict: Verdict | null;
  value: string;
  familiarity: number | null;
}

export type TaskForms = Map<string, QuestionForm>;

export function emptyForms(task: TaskPayload): TaskForms {
  const forms: TaskForms = new Map();
  for (const question of task.questions) {
    forms.set(question.question_id, { verdict: null, value: "", familiarity: null });
  }
  return forms;
}

export function validFamiliarity(value: number | null): value is number {
  return (
    value !== null &&
    Number.isInteger(value) &&
    value >= FAMILIARITY_MIN &&
    value <= FAMILIARITY_MAX
  );
}

/** A question is answerable when it has a verdict, a familiarity score, and
 * a non-blank value whenever the verdict is yes. */
export function isQuestionComplete(form: QuestionForm): boolean {
  if (form.verdict === null || !validFamiliarity(form.familiarity)) {
    return false;
  }
  if (form.verdict === "yes" && form.value.trim() === "") {
    return false;
  }
  return true;
}

/** Submit stays disabled until every question on the task is complete. */
export function canSubmit(task: TaskPayload, forms: TaskForms): boolean {
  return task.questions.every((question) => {
    const form = forms.get(question.question_id);
    return form !== undefined && isQuestionComplete(form);
  });
}

/** One judgment per question. The value rides along only on yes answers and
 * no confidence field is ever included: the gateway owns that policy. */
export function buildJudgments(task: TaskPayload, forms: TaskForms): JudgmentPayload[] {
  if (!canSubmit(task, forms)) {
    throw new Error("form is incomplete");
  }
  return task.questions.map((question) => {
    const form = forms.get(question.question_id)!;
    const judgment: JudgmentPayload = {
      question_id: question.question_id,
      verdict: form.verdict!,
      familiarity: form.familiarity!,
    };
    if (form.verdict === "yes") {
      judgment.value = form.value.trim();
    }
    return judgment;
  });
}
