import { ApiError, fetchNextTask, submitJudgment } from "./api.js";
import {
  canSubmit,
  emptyForms,
  isQuestionComplete,
  type QuestionForm,
  type TaskForms,
} from "./form.js";
import type { TaskPayload, Verdict } from "./protocol.js";

const POLL_MS = 2500;
const VERDICT_LABELS: [Verdict, string][] = [
  ["yes", "Yes"],
  ["no", "No"],
  ["not_sure", "Not sure"],
];

class WorkerApp {
  private readonly root: HTMLElement;
  private readonly baseUrl: string;
  private task: TaskPayload | null = null;
  private forms: TaskForms = new Map();
  private banner = "";
  private questionErrors = new Map<string, string>();
  private submitting = false;

  constructor(root: HTMLElement, baseUrl: string) {
    this.root = root;
    this.baseUrl = baseUrl;
  }

  async start(): Promise<void> {
    await this.poll();
  }

  private async poll(): Promise<void> {
    try {
      const task = await fetchNextTask(this.baseUrl);
      this.banner = "";
      if (task && task.questions.length > 0) {
        if (!this.task || this.task.task_id !== task.task_id) {
          this.task = task;
          this.forms = emptyForms(task);
          this.questionErrors.clear();
        }
      } else {
        this.task = null;
      }
    } catch (err) {
      this.banner = err instanceof ApiError ? err.message : String(err);
      this.task = null;
    }
    this.render();
    if (!this.task) {
      setTimeout(() => void this.poll(), POLL_MS);
    }
  }

  private async submit(): Promise<void> {
    if (!this.task || this.submitting || !canSubmit(this.task, this.forms)) {
      return;
    }
    this.submitting = true;
    this.render();
    const task = this.task;
    const { buildJudgments } = await import("./form.js");
    let failed = false;
    for (const judgment of buildJudgments(task, this.forms)) {
      try {
        await submitJudgment(this.baseUrl, judgment);
        this.questionErrors.delete(judgment.question_id);
      } catch (err) {
        // re-show the rejected judgment with the server's reason
        this.questionErrors.set(
          judgment.question_id,
          err instanceof ApiError ? err.message : String(err),
        );
        failed = true;
      }
    }
    this.submitting = false;
    if (!failed) {
      this.task = null;
      await this.poll();
    } else {
      this.render();
    }
  }

  private render(): void {
    this.root.replaceChildren();
    if (this.banner) {
      const div = el("div", "banner", `Cannot reach the task gateway: ${this.banner}. Retrying…`);
      this.root.appendChild(div);
    }
    if (!this.task) {
      this.root.appendChild(
        el("div", "idle", this.banner ? "" : "No open tasks right now — waiting for work…"),
      );
      return;
    }
    const task = this.task;
    const header = el("h2", "", "Please answer the following questions");
    this.root.appendChild(header);
    for (const question of task.questions) {
      this.root.appendChild(this.renderQuestion(question.question_id,
        question.existence_text, question.value_text));
    }
    const button = el("button", "submit", this.submitting ? "Submitting…" : "Submit answers") as HTMLButtonElement;
    button.disabled = this.submitting || !canSubmit(task, this.forms);
    button.addEventListener("click", () => void this.submit());
    this.root.appendChild(button);
  }

  private renderQuestion(id: string, existence: string, valueText: string): HTMLElement {
    const form = this.forms.get(id)!;
    const card = el("div", "card");
    card.appendChild(el("p", "existence", existence));

    const verdicts = el("div", "verdicts");
    for (const [verdict, label] of VERDICT_LABELS) {
      const wrap = el("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = `verdict-${id}`;
      radio.checked = form.verdict === verdict;
      radio.addEventListener("change", () => {
        form.verdict = verdict;
        this.render();
      });
      wrap.appendChild(radio);
      wrap.appendChild(document.createTextNode(` ${label}`));
      verdicts.appendChild(wrap);
    }
    card.appendChild(verdicts);

    if (form.verdict === "yes") {
      const valueWrap = el("div", "value");
      valueWrap.appendChild(el("p", "", valueText));
      const input = document.createElement("input");
      input.type = "text";
      input.value = form.value;
      input.placeholder = "your answer";
      input.addEventListener("input", () => {
        form.value = input.value;
        this.refreshSubmit();
      });
      valueWrap.appendChild(input);
      card.appendChild(valueWrap);
    }

    const famWrap = el("div", "familiarity");
    famWrap.appendChild(el("span", "", "How familiar are you with this topic? "));
    const select = document.createElement("select");
    const placeholder = document.createElement("option");
    placeholder.textContent = "pick 1–7";
    placeholder.value = "";
    select.appendChild(placeholder);
    for (let score = 1; score <= 7; score++) {
      const option = document.createElement("option");
      option.value = String(score);
      option.textContent = `${score}`;
      option.selected = form.familiarity === score;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      form.familiarity = select.value === "" ? null : Number(select.value);
      this.refreshSubmit();
    });
    famWrap.appendChild(select);
    card.appendChild(famWrap);

    const error = this.questionErrors.get(id);
    if (error) {
      card.appendChild(el("p", "error", `Rejected: ${error}`));
    }
    if (!isQuestionComplete(form)) {
      card.classList.add("incomplete");
    }
    return card;
  }

  private refreshSubmit(): void {
    const button = this.root.querySelector("button.submit") as HTMLButtonElement | null;
    if (button && this.task) {
      button.disabled = this.submitting || !canSubmit(this.task, this.forms);
    }
  }
}

function el(tag: string, className = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const root = document.getElementById("app")!;
  void new WorkerApp(root, "").start();
}

export { WorkerApp };
