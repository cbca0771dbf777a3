/** SVG quadrant scatter with draggable benchmark lines.
 *
 * x: predicted extra reports to the next objective (unreachable tasks
 * park at the right edge); y: the next objective level. Dragging the
 * vertical cost line or horizontal quality line updates the store's
 * benchmarks, which re-queries /tradeoff and recolors every dot. */

import { REGION_COLORS, TradeoffRegion } from "./regions.js";
import { DashboardStore, TaskCardViewModel } from "./store.js";

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { top: 16, right: 24, bottom: 42, left: 56 };
const SVG_NS = "http://www.w3.org/2000/svg";

interface Scale {
  maxCost: number;
  x(cost: number): number;
  y(objective: number): number;
  costAt(px: number): number;
  qualityAt(py: number): number;
}

function makeScale(maxCost: number): Scale {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
  return {
    maxCost,
    x: (cost) => MARGIN.left + (Math.min(cost, maxCost) / maxCost) * innerW,
    y: (objective) => MARGIN.top + (1 - objective) * innerH,
    costAt: (px) =>
      Math.max(0, ((px - MARGIN.left) / innerW) * maxCost),
    qualityAt: (py) =>
      Math.min(1, Math.max(0.01, 1 - (py - MARGIN.top) / innerH)),
  };
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export class QuadrantView {
  readonly svg: SVGSVGElement;
  private dragging: "cost" | "quality" | null = null;

  constructor(container: HTMLElement, private store: DashboardStore) {
    this.svg = el("svg", {
      viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
      width: "100%",
      class: "quadrant",
    });
    this.svg.dataset.testid = "quadrant";
    container.appendChild(this.svg);
    this.svg.addEventListener("pointerdown", (e) => this.onPointerDown(e));
    this.svg.addEventListener("pointermove", (e) => this.onPointerMove(e));
    this.svg.addEventListener("pointerup", () => this.onPointerUp());
    this.svg.addEventListener("pointerleave", () => this.onPointerUp());
    store.subscribe(() => this.render());
    this.render();
  }

  private openCards(): TaskCardViewModel[] {
    return [...this.store.state.cards.values()].filter(
      (c) => c.status === "open" && c.region !== null
    );
  }

  private scale(): Scale {
    const costs = this.openCards().map((c) =>
      c.reachable && c.extraReports !== null ? c.extraReports : 0
    );
    const benchmark = this.store.state.benchmarks.cost;
    const max = Math.max(20, benchmark * 2, ...costs) * 1.15;
    return makeScale(max);
  }

  render(): void {
    const scale = this.scale();
    const { quality, cost } = this.store.state.benchmarks;
    this.svg.replaceChildren();

    const plot = el("rect", {
      x: MARGIN.left,
      y: MARGIN.top,
      width: WIDTH - MARGIN.left - MARGIN.right,
      height: HEIGHT - MARGIN.top - MARGIN.bottom,
      class: "quadrant-bg",
    });
    this.svg.appendChild(plot);

    // benchmark lines: vertical = cost, horizontal = quality
    const costLine = el("line", {
      x1: scale.x(cost),
      x2: scale.x(cost),
      y1: MARGIN.top,
      y2: HEIGHT - MARGIN.bottom,
      class: "benchmark-line cost-line",
    });
    costLine.dataset.testid = "cost-line";
    const qualityLine = el("line", {
      x1: MARGIN.left,
      x2: WIDTH - MARGIN.right,
      y1: scale.y(quality),
      y2: scale.y(quality),
      class: "benchmark-line quality-line",
    });
    qualityLine.dataset.testid = "quality-line";
    this.svg.append(costLine, qualityLine);

    for (const card of this.openCards()) {
      const unreachable = !card.reachable || card.extraReports === null;
      const x = unreachable
        ? WIDTH - MARGIN.right - 8
        : scale.x(card.extraReports ?? 0);
      const y = scale.y(card.nextObjective ?? 1);
      const dot = el("circle", {
        cx: x,
        cy: y,
        r: 7,
        fill: REGION_COLORS[card.region as TradeoffRegion],
        class: "task-dot",
      });
      dot.dataset.testid = `dot-${card.taskId}`;
      dot.dataset.region = card.region ?? "";
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = unreachable
        ? `${card.taskId}: objective unreachable`
        : `${card.taskId}: ${card.extraReports} extra reports`;
      dot.appendChild(title);
      this.svg.appendChild(dot);
      const label = el("text", { x: x + 9, y: y - 8, class: "dot-label" });
      label.textContent = card.taskId;
      this.svg.appendChild(label);
    }

    const xLabel = el("text", {
      x: WIDTH / 2,
      y: HEIGHT - 8,
      class: "axis-label",
    });
    xLabel.textContent = "predicted extra reports to next objective";
    const yLabel = el("text", {
      x: 14,
      y: HEIGHT / 2,
      class: "axis-label",
      transform: `rotate(-90 14 ${HEIGHT / 2})`,
    });
    yLabel.textContent = "next objective";
    this.svg.append(xLabel, yLabel);
  }

  private svgPoint(event: PointerEvent): { x: number; y: number } {
    const rect = this.svg.getBoundingClientRect();
    const width = rect.width || WIDTH;
    const height = rect.height || HEIGHT;
    return {
      x: ((event.clientX - rect.left) / width) * WIDTH,
      y: ((event.clientY - rect.top) / height) * HEIGHT,
    };
  }

  private onPointerDown(event: PointerEvent): void {
    const point = this.svgPoint(event);
    const scale = this.scale();
    const { quality, cost } = this.store.state.benchmarks;
    if (Math.abs(point.x - scale.x(cost)) < 12) {
      this.dragging = "cost";
    } else if (Math.abs(point.y - scale.y(quality)) < 12) {
      this.dragging = "quality";
    }
  }

  private onPointerMove(event: PointerEvent): void {
    if (!this.dragging) return;
    const point = this.svgPoint(event);
    const scale = this.scale();
    const benchmarks = { ...this.store.state.benchmarks };
    if (this.dragging === "cost") {
      benchmarks.cost = Math.round(scale.costAt(point.x) * 10) / 10;
    } else {
      benchmarks.quality = Math.round(scale.qualityAt(point.y) * 100) / 100;
    }
    void this.store.setBenchmarks(benchmarks);
  }

  private onPointerUp(): void {
    this.dragging = null;
  }
}
