// @vitest-environment jsdom
/** Scripted dashboard session against a live service: load the corpus,
 * drag the benchmark lines, run a what-if query, close one task through
 * the confirmation dialog — then assert the service's event log holds
 * exactly one manual-close event for that task. */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { mountDashboard } from "../src/main";
import { DashboardStore } from "../src/store";
import {
  ServiceHandle,
  generateStreams,
  readEventLog,
  seedTasks,
  startService,
  stopService,
} from "./harness";

let service: ServiceHandle;
let store: DashboardStore;
let taskIds: string[];

async function waitFor(
  predicate: () => boolean,
  label: string,
  timeoutMs = 20000
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
  throw new Error(`timed out waiting for ${label}`);
}

function pointer(type: string, x: number, y: number): MouseEvent {
  return new MouseEvent(type, { clientX: x, clientY: y, bubbles: true });
}

beforeAll(async () => {
  service = await startService(8472);
  const streams = generateStreams(4, 77);
  taskIds = await seedTasks(service.baseUrl, streams, [0.5, 0.7, 0.9, 0.6]);

  const html = readFileSync(join(__dirname, "..", "index.html"), "utf-8");
  document.body.innerHTML = html.split("<body>")[1].split("</body>")[0];
  window.history.replaceState({}, "", `/?api=${service.baseUrl}&poll=400`);
  store = mountDashboard(document);
  await waitFor(
    () => store.state.cards.size === taskIds.length,
    "cards to load"
  );
}, 120_000);

afterAll(() => {
  store?.stop();
  if (service) stopService(service);
});

describe("scripted dashboard session", () => {
  it("renders one card and one quadrant dot per open task", async () => {
    await waitFor(
      () => document.querySelectorAll("[data-testid^='card-']").length >= taskIds.length,
      "cards rendered"
    );
    for (const id of taskIds) {
      expect(document.querySelector(`[data-testid='card-${id}']`)).toBeTruthy();
    }
    expect(document.querySelectorAll(".task-dot").length).toBeGreaterThan(0);
  }, 60_000);

  it("dragging the benchmark lines updates benchmarks and recolors", async () => {
    const svg = document.querySelector("[data-testid='quadrant']") as SVGSVGElement;
    const costLine = svg.querySelector("[data-testid='cost-line']") as SVGLineElement;
    const startX = Number(costLine.getAttribute("x1"));
    const before = store.state.benchmarks.cost;

    svg.dispatchEvent(pointer("pointerdown", startX, 100));
    svg.dispatchEvent(pointer("pointermove", startX + 120, 100));
    svg.dispatchEvent(pointer("pointerup", startX + 120, 100));

    await waitFor(
      () => store.state.benchmarks.cost !== before,
      "cost benchmark to move"
    );
    expect(store.state.benchmarks.cost).toBeGreaterThan(before);

    // regions after the drag match a fresh server query for every card
    await waitFor(
      () => [...store.state.cards.values()].every((c) => c.region !== null),
      "regions refreshed"
    );
    for (const card of store.state.cards.values()) {
      const { quality, cost } = store.state.benchmarks;
      const response = await fetch(
        `${service.baseUrl}/tasks/${card.taskId}/tradeoff?quality=${quality}&cost=${cost}`
      );
      const view = await response.json();
      expect(card.region).toBe(view.region);
    }
  }, 60_000);

  it("answers a what-if query with the server's number", async () => {
    const select = document.querySelector(
      "[data-testid='whatif-task']"
    ) as HTMLSelectElement;
    const target = document.querySelector(
      "[data-testid='whatif-target']"
    ) as HTMLInputElement;
    select.value = taskIds[0];
    target.value = "0.95";
    (document.querySelector("[data-testid='whatif-form']") as HTMLFormElement)
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await waitFor(() => store.state.whatIf !== null, "what-if result");
    const shown = (
      document.querySelector("[data-testid='whatif-result']") as HTMLElement
    ).textContent;
    const whatIf = store.state.whatIf!;
    if (whatIf.reachable) {
      const reply = await fetch(
        `${service.baseUrl}/tasks/${taskIds[0]}/forecast?target=0.95`
      ).then((r) => r.json());
      expect(whatIf.extraReports).toBe(reply.extra_reports);
      expect(shown).toContain(String(reply.extra_reports));
    } else {
      expect(shown).toContain("unreachable");
    }
  }, 60_000);

  it("closes one task through the dialog, logging exactly one manual close", async () => {
    const victim = taskIds[1];
    const button = document.querySelector(
      `[data-testid='card-${victim}'] .close-btn`
    ) as HTMLButtonElement;
    button.click();
    await waitFor(
      () => document.querySelector("[data-testid='close-dialog']") !== null,
      "confirmation dialog"
    );
    (
      document.querySelector("[data-testid='confirm-close']") as HTMLButtonElement
    ).click();
    await waitFor(
      () => store.state.cards.get(victim)?.status === "closed",
      "task to close"
    );
    await waitFor(
      () =>
        document.querySelector(`#closed-tasks [data-testid='card-${victim}']`) !==
        null,
      "card to move to the closed list"
    );

    const manualCloses = readEventLog(service.dataDir, victim).filter(
      (record) => record.type === "ManualClose"
    );
    expect(manualCloses).toHaveLength(1);

    // closing again is an idempotent no-op with a notice, not a second event
    await store.confirmClose(victim);
    await waitFor(
      () => (store.state.notice ?? "").includes("already closed"),
      "idempotence notice"
    );
    const after = readEventLog(service.dataDir, victim).filter(
      (record) => record.type === "ManualClose"
    );
    expect(after).toHaveLength(1);
    const closedEvents = readEventLog(service.dataDir, victim).filter(
      (record) => record.type === "TaskClosed" && record.manual === true
    );
    expect(closedEvents).toHaveLength(1);
  }, 60_000);
});
