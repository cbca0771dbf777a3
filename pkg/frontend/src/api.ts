/** Typed client for the bugcensus service API. All dashboard data comes
 * through here; the page never reads files or computes estimates itself. */

export interface EstimateInfo {
  capture_index: number;
  n_hat: number;
  n_hat_rounded: number;
  C: number | null;
  gamma_sq: number | null;
}

export interface CloseInfo {
  close_capture_index: number;
  close_time: string | null;
  detected_at_close: number;
  n_hat_at_close: number;
}

export interface TaskSnapshot {
  task_id: string;
  status: "open" | "closed";
  reports_received: number;
  bugs_detected: number;
  captures_completed: number;
  estimates: Record<string, EstimateInfo | null>;
  latest_forecast: number[] | null;
  close: CloseInfo | null;
  achieved_pct: number | null;
  post_close_reports: number;
}

export interface EstimateRecord {
  task_id: string;
  capture_index: number;
  estimator: string;
  n_hat: number;
  n_hat_rounded: number;
  C: number | null;
  gamma_sq: number | null;
}

export interface ForecastResponse {
  task_id: string;
  target_pct: number;
  target_bugs: number;
  extra_reports: number;
  horizon_windows: number;
  reachable: boolean;
}

export interface TradeoffResponse {
  task_id: string;
  achieved_pct: number;
  next_objective: number;
  extra_reports: number;
  reachable: boolean;
  region: string;
  quality_benchmark: number;
  cost_benchmark: number;
}

export interface CloseResponse {
  task_id: string;
  closed_now: boolean;
  already_closed: boolean;
}

export interface ServiceEvent {
  seq: number;
  type: string;
  [key: string]: unknown;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    const body = await response.text();
    throw new ApiError(response.status, body || response.statusText);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(public baseUrl: string) {}

  listTasks(): Promise<TaskSnapshot[]> {
    return getJson(`${this.baseUrl}/tasks`);
  }

  getTask(taskId: string): Promise<TaskSnapshot> {
    return getJson(`${this.baseUrl}/tasks/${encodeURIComponent(taskId)}`);
  }

  getEstimates(taskId: string): Promise<EstimateRecord[]> {
    return getJson(`${this.baseUrl}/tasks/${encodeURIComponent(taskId)}/estimates`);
  }

  getForecast(taskId: string, targetPct: number): Promise<ForecastResponse> {
    const target = encodeURIComponent(targetPct);
    return getJson(
      `${this.baseUrl}/tasks/${encodeURIComponent(taskId)}/forecast?target=${target}`
    );
  }

  getTradeoff(
    taskId: string,
    quality: number,
    cost: number
  ): Promise<TradeoffResponse> {
    const q = encodeURIComponent(quality);
    const c = encodeURIComponent(cost);
    return getJson(
      `${this.baseUrl}/tasks/${encodeURIComponent(taskId)}/tradeoff?quality=${q}&cost=${c}`
    );
  }

  async closeTask(taskId: string): Promise<CloseResponse> {
    const response = await fetch(
      `${this.baseUrl}/tasks/${encodeURIComponent(taskId)}/close`,
      { method: "POST" }
    );
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return response.json() as Promise<CloseResponse>;
  }

  getEvents(taskId: string, since = 0): Promise<ServiceEvent[]> {
    return getJson(
      `${this.baseUrl}/tasks/${encodeURIComponent(taskId)}/events?since=${since}`
    );
  }
}
