import type { JudgmentPayload, StatusPayload, TaskPayload } from "./protocol.js";

/** Error from the gateway (carries the server's reason) or from the network. */
export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = "ApiError";
  }
}

async function reasonOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: string };
    if (body && typeof body.error === "string") {
      return body.error;
    }
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${response.status}`;
}

/** Next open task, or null when the queue is empty (204). */
export async function fetchNextTask(baseUrl: string): Promise<TaskPayload | null> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl}/tasks/next`);
  } catch (err) {
    throw new ApiError(`gateway unreachable: ${String(err)}`);
  }
  if (response.status === 204) {
    return null;
  }
  if (!response.ok) {
    throw new ApiError(await reasonOf(response), response.status);
  }
  const task = (await response.json()) as TaskPayload;
  if (!task || typeof task.task_id !== "string" || !Array.isArray(task.questions)) {
    throw new ApiError("malformed task payload");
  }
  return task;
}

/** Post one judgment; resolves when accepted, throws ApiError with the
 * server's reason otherwise. */
export async function submitJudgment(
  baseUrl: string,
  judgment: JudgmentPayload,
): Promise<void> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl}/judgments`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(judgment),
    });
  } catch (err) {
    throw new ApiError(`gateway unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    throw new ApiError(await reasonOf(response), response.status);
  }
}

export async function fetchStatus(baseUrl: string): Promise<StatusPayload> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl}/status`);
  } catch (err) {
    throw new ApiError(`gateway unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    throw new ApiError(await reasonOf(response), response.status);
  }
  return (await response.json()) as StatusPayload;
}
