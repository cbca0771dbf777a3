/** What-if panel: price an arbitrary detection objective for one task.
 *
 * The number shown is the service's answer verbatim; unreachable
 * objectives get an explicit badge, never a number, and tasks still in
 * forecast warm-up get an "insufficient history" notice. */

import { DashboardStore } from "./store.js";

export class WhatIfView {
  private select: HTMLSelectElement;
  private input: HTMLInputElement;
  private output: HTMLElement;

  constructor(root: HTMLElement, private store: DashboardStore) {
    root.innerHTML = `
      <form class="whatif" data-testid="whatif-form">
        <label>task
          <select name="task" data-testid="whatif-task"></select>
        </label>
        <label>target share
          <input name="target" type="number" min="0.05" max="1" step="0.05"
                 value="0.95" data-testid="whatif-target">
        </label>
        <button type="submit" data-testid="whatif-run">price it</button>
        <output data-testid="whatif-result"></output>
      </form>`;
    this.select = root.querySelector("select") as HTMLSelectElement;
    this.input = root.querySelector("input") as HTMLInputElement;
    this.output = root.querySelector("output") as HTMLElement;
    (root.querySelector("form") as HTMLFormElement).addEventListener(
      "submit",
      (e) => {
        e.preventDefault();
        void this.run();
      }
    );
    store.subscribe(() => this.render());
    this.render();
  }

  async run(): Promise<void> {
    const taskId = this.select.value;
    if (!taskId) return;
    await this.store.whatIfCost(taskId, Number(this.input.value));
  }

  render(): void {
    const openIds = [...this.store.state.cards.values()]
      .filter((c) => c.status === "open")
      .map((c) => c.taskId);
    const current = this.select.value;
    this.select.innerHTML = openIds
      .map((id) => `<option value="${id}">${id}</option>`)
      .join("");
    if (openIds.includes(current)) {
      this.select.value = current;
    }
    const result = this.store.state.whatIf;
    if (!result) {
      this.output.textContent = "";
      return;
    }
    if (result.notice) {
      this.output.innerHTML = `<span class="notice">${result.notice}</span>`;
    } else if (!result.reachable) {
      this.output.innerHTML = `<span class="unreachable-badge">unreachable</span>`;
    } else {
      this.output.textContent = `${result.extraReports} extra reports to ${(
        result.targetPct * 100
      ).toFixed(0)}%`;
    }
  }
}
