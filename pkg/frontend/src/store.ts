/** Dashboard state: polled snapshots, benchmark settings, what-if results.
 *
 * The store is the single owner of server data. It polls on a fixed
 * cadence (default 2 s), keeps the last good data with a stale flag when
 * the API is unreachable, and re-queries /tradeoff whenever the
 * benchmark lines move. Mutation happens only through the API; the close
 * action is optimistic in the UI and reconciled with the server reply. */

import {
  ApiClient,
  ForecastResponse,
  TaskSnapshot,
  TradeoffResponse,
} from "./api.js";
import { Benchmarks, TradeoffRegion } from "./regions.js";

export interface TaskCardViewModel {
  taskId: string;
  status: "open" | "closed";
  achievedPct: number | null;
  nHatRounded: number | null;
  detected: number;
  reportsReceived: number;
  /** Extra reports to the next 5% objective, null before forecasts exist. */
  extraReports: number | null;
  reachable: boolean;
  nextObjective: number | null;
  region: TradeoffRegion | null;
  /** Sparkline series: per-capture estimate history (rounded). */
  estimateHistory: number[];
  /** Sparkline series: detected-bug counts per capture. */
  detectedHistory: number[];
  postCloseReports: number;
  closedManually: boolean | null;
}

export interface WhatIfResult {
  taskId: string;
  targetPct: number;
  extraReports: number | null;
  reachable: boolean;
  /** Set when the server refused the query (warm-up, no estimate). */
  notice: string | null;
}

export interface StoreState {
  cards: Map<string, TaskCardViewModel>;
  benchmarks: Benchmarks;
  stale: boolean;
  lastError: string | null;
  whatIf: WhatIfResult | null;
  pendingClose: string | null;
  notice: string | null;
}

type Listener = (state: StoreState) => void;

export class DashboardStore {
  readonly state: StoreState;
  private listeners: Listener[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: ApiClient,
    benchmarks: Benchmarks = { quality: 0.85, cost: 10 },
    public pollMs = 2000
  ) {
    this.state = {
      cards: new Map(),
      benchmarks,
      stale: false,
      lastError: null,
      whatIf: null,
      pendingClose: null,
      notice: null,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  start(): void {
    if (this.timer !== null) return;
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.pollMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** One polling round: snapshots, estimate histories, quadrant queries. */
  async refresh(): Promise<void> {
    let snapshots: TaskSnapshot[];
    try {
      snapshots = await this.api.listTasks();
    } catch (err) {
      this.state.stale = true;
      this.state.lastError = String(err);
      this.emit();
      return;
    }
    const cards = new Map<string, TaskCardViewModel>();
    for (const snap of snapshots) {
      cards.set(snap.task_id, await this.buildCard(snap));
    }
    this.state.cards = cards;
    this.state.stale = false;
    this.state.lastError = null;
    this.emit();
  }

  private async buildCard(snap: TaskSnapshot): Promise<TaskCardViewModel> {
    const previous = this.state.cards.get(snap.task_id);
    const estimate = snap.estimates["Mth"] ?? Object.values(snap.estimates)[0];
    const card: TaskCardViewModel = {
      taskId: snap.task_id,
      status: snap.status,
      achievedPct: snap.achieved_pct,
      nHatRounded: estimate ? estimate.n_hat_rounded : null,
      detected: snap.bugs_detected,
      reportsReceived: snap.reports_received,
      extraReports: null,
      reachable: true,
      nextObjective: null,
      region: null,
      estimateHistory: previous?.estimateHistory ?? [],
      detectedHistory: previous?.detectedHistory ?? [],
      postCloseReports: snap.post_close_reports,
      closedManually: previous?.closedManually ?? null,
    };
    try {
      const records = await this.api.getEstimates(snap.task_id);
      card.estimateHistory = records.map((r) => r.n_hat_rounded);
    } catch {
      // keep the previous sparkline on a transient failure
    }
    card.detectedHistory = this.appendDetected(previous, snap);
    const view = await this.queryTradeoff(snap.task_id);
    if (view) {
      card.region = view.region as TradeoffRegion;
      card.extraReports = view.extra_reports;
      card.reachable = view.reachable;
      card.nextObjective = view.next_objective;
      card.achievedPct = view.achieved_pct;
    }
    return card;
  }

  private appendDetected(
    previous: TaskCardViewModel | undefined,
    snap: TaskSnapshot
  ): number[] {
    const history = previous ? [...previous.detectedHistory] : [];
    if (
      history.length === 0 ||
      history[history.length - 1] !== snap.bugs_detected
    ) {
      history.push(snap.bugs_detected);
    }
    return history;
  }

  private async queryTradeoff(taskId: string): Promise<TradeoffResponse | null> {
    const { quality, cost } = this.state.benchmarks;
    try {
      return await this.api.getTradeoff(taskId, quality, cost);
    } catch {
      return null; // warm-up or no estimate yet: no region for this card
    }
  }

  /** Moves the benchmark lines and recolors every card from the server. */
  async setBenchmarks(benchmarks: Benchmarks): Promise<void> {
    this.state.benchmarks = benchmarks;
    for (const [taskId, card] of this.state.cards) {
      const view = await this.queryTradeoff(taskId);
      if (view) {
        card.region = view.region as TradeoffRegion;
        card.extraReports = view.extra_reports;
        card.reachable = view.reachable;
        card.nextObjective = view.next_objective;
      }
    }
    this.emit();
  }

  /** What-if cost query; the displayed number is the server's verbatim. */
  async whatIfCost(taskId: string, targetPct: number): Promise<WhatIfResult> {
    let result: WhatIfResult;
    try {
      const forecast: ForecastResponse = await this.api.getForecast(
        taskId,
        targetPct
      );
      result = {
        taskId,
        targetPct,
        extraReports: forecast.reachable ? forecast.extra_reports : null,
        reachable: forecast.reachable,
        notice: null,
      };
    } catch (err) {
      result = {
        taskId,
        targetPct,
        extraReports: null,
        reachable: false,
        notice: "insufficient history",
      };
    }
    this.state.whatIf = result;
    this.emit();
    return result;
  }

  /** First step of the close flow: arm the confirmation dialog. */
  requestClose(taskId: string): void {
    this.state.pendingClose = taskId;
    this.emit();
  }

  cancelClose(): void {
    this.state.pendingClose = null;
    this.emit();
  }

  /** Confirmed close: POST, reconcile, and surface idempotence notices. */
  async confirmClose(taskId: string): Promise<void> {
    this.state.pendingClose = null;
    const card = this.state.cards.get(taskId);
    if (card) {
      card.status = "closed"; // optimistic; reconciled below
    }
    try {
      const reply = await this.api.closeTask(taskId);
      if (reply.already_closed) {
        this.state.notice = `${taskId} was already closed`;
      } else {
        this.state.notice = `${taskId} closed`;
        if (card) card.closedManually = true;
      }
    } catch (err) {
      this.state.notice = `close failed: ${String(err)}`;
      if (card) card.status = "open";
    }
    this.emit();
    await this.refresh();
  }
}
