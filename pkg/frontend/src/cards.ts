/** Task cards: live counters, sparklines, and the close flow.
 *
 * Open tasks render as cards with two sparklines (detected bugs and the
 * estimate history) plus the quadrant region under the current
 * benchmarks. Closed tasks move to a separate list; any reports still
 * replaying after close show as a greyed post-close tally. */

import { REGION_COLORS, TradeoffRegion } from "./regions.js";
import { DashboardStore, TaskCardViewModel } from "./store.js";

function sparkline(values: number[], cssClass: string): string {
  if (values.length < 2) {
    return `<svg class="sparkline ${cssClass}" viewBox="0 0 120 28"></svg>`;
  }
  const max = Math.max(...values, 1);
  const step = 120 / (values.length - 1);
  const points = values
    .map((v, i) => `${(i * step).toFixed(1)},${(26 - (v / max) * 24).toFixed(1)}`)
    .join(" ");
  return (
    `<svg class="sparkline ${cssClass}" viewBox="0 0 120 28">` +
    `<polyline points="${points}" fill="none"/></svg>`
  );
}

function pct(value: number | null): string {
  return value === null ? "–" : `${(value * 100).toFixed(1)}%`;
}

function cardHtml(card: TaskCardViewModel): string {
  const region = card.region;
  const badge = region
    ? `<span class="region-badge" data-testid="region-${card.taskId}"` +
      ` style="background:${REGION_COLORS[region as TradeoffRegion]}">${region}</span>`
    : `<span class="region-badge muted">warming up</span>`;
  const cost =
    card.region === null
      ? "–"
      : card.reachable && card.extraReports !== null
        ? `${card.extraReports} reports`
        : `<span class="unreachable-badge">unreachable</span>`;
  const postClose =
    card.postCloseReports > 0
      ? `<div class="post-close">+${card.postCloseReports} post-close reports</div>`
      : "";
  const closeButton =
    card.status === "open"
      ? `<button class="close-btn" data-task="${card.taskId}">close task</button>`
      : "";
  return `
    <article class="card ${card.status}" data-testid="card-${card.taskId}">
      <header><h3>${card.taskId}</h3>${badge}</header>
      <dl>
        <div><dt>detected</dt><dd>${card.detected}</dd></div>
        <div><dt>predicted</dt><dd>${card.nHatRounded ?? "–"}</dd></div>
        <div><dt>achieved</dt><dd data-testid="achieved-${card.taskId}">${pct(card.achievedPct)}</dd></div>
        <div><dt>next objective</dt><dd>${pct(card.nextObjective)}</dd></div>
        <div><dt>cost to next</dt><dd data-testid="cost-${card.taskId}">${cost}</dd></div>
        <div><dt>reports</dt><dd>${card.reportsReceived}</dd></div>
      </dl>
      ${sparkline(card.detectedHistory, "spark-detected")}
      ${sparkline(card.estimateHistory, "spark-estimates")}
      ${postClose}
      ${closeButton}
    </article>`;
}

export class CardListView {
  constructor(
    private openList: HTMLElement,
    private closedList: HTMLElement,
    private store: DashboardStore
  ) {
    store.subscribe(() => this.render());
    openList.addEventListener("click", (e) => this.onClick(e));
    this.render();
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    if (target.matches(".close-btn")) {
      this.store.requestClose(target.dataset.task as string);
    }
  }

  render(): void {
    const cards = [...this.store.state.cards.values()];
    const open = cards.filter((c) => c.status === "open");
    const closed = cards.filter((c) => c.status === "closed");
    this.openList.innerHTML = open.map(cardHtml).join("") || "<p>no open tasks</p>";
    this.closedList.innerHTML =
      closed.map(cardHtml).join("") || "<p>no closed tasks</p>";
  }
}

/** Modal confirmation for the close action. */
export class CloseDialog {
  constructor(private root: HTMLElement, private store: DashboardStore) {
    store.subscribe(() => this.render());
    root.addEventListener("click", (e) => this.onClick(e));
    this.render();
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    if (target.matches("[data-confirm]")) {
      void this.store.confirmClose(target.dataset.confirm as string);
    } else if (target.matches("[data-cancel]")) {
      this.store.cancelClose();
    }
  }

  render(): void {
    const pending = this.store.state.pendingClose;
    if (!pending) {
      this.root.innerHTML = "";
      this.root.classList.remove("visible");
      return;
    }
    this.root.classList.add("visible");
    this.root.innerHTML = `
      <div class="dialog" data-testid="close-dialog">
        <p>Close task <strong>${pending}</strong> now? Later reports will
        not count toward its detection level.</p>
        <button data-confirm="${pending}" data-testid="confirm-close">close it</button>
        <button data-cancel="1">keep testing</button>
      </div>`;
  }
}
