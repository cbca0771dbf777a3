/** Dashboard bootstrap: wire the store to the views and start polling.
 *
 * Configuration via query parameters: `?api=http://host:port` points at
 * the service (default: same origin), `&poll=2000` sets the polling
 * cadence in milliseconds. */

import { ApiClient } from "./api.js";
import { CardListView, CloseDialog } from "./cards.js";
import { QuadrantView } from "./quadrant.js";
import { DashboardStore } from "./store.js";
import { WhatIfView } from "./whatif.js";

export function mountDashboard(root: Document = document): DashboardStore {
  const params = new URLSearchParams(root.defaultView?.location.search ?? "");
  const apiBase = params.get("api") ?? "";
  const pollMs = Number(params.get("poll") ?? "2000");

  const store = new DashboardStore(
    new ApiClient(apiBase),
    { quality: 0.85, cost: 10 },
    pollMs
  );

  const banner = root.getElementById("stale-banner") as HTMLElement;
  const benchmarkLabel = root.getElementById("benchmark-label") as HTMLElement;
  store.subscribe((state) => {
    banner.classList.toggle("visible", state.stale);
    const { quality, cost } = state.benchmarks;
    benchmarkLabel.textContent = `quality ≥ ${(quality * 100).toFixed(0)}% · cost ≤ ${cost} reports`;
    const notice = root.getElementById("notice") as HTMLElement;
    notice.textContent = state.notice ?? "";
  });

  new QuadrantView(root.getElementById("quadrant-root") as HTMLElement, store);
  new CardListView(
    root.getElementById("open-tasks") as HTMLElement,
    root.getElementById("closed-tasks") as HTMLElement,
    store
  );
  new CloseDialog(root.getElementById("dialog-root") as HTMLElement, store);
  new WhatIfView(root.getElementById("whatif-root") as HTMLElement, store);

  store.start();
  return store;
}

declare global {
  interface Window {
    dashboardStore?: DashboardStore;
  }
}

if (typeof document !== "undefined" && document.getElementById("quadrant-root")) {
  window.dashboardStore = mountDashboard();
}
