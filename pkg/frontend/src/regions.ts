/** Quadrant classification mirroring the server's decision rule.
 *
 * This is the one piece of decision logic duplicated client-side, so the
 * quadrant can recolor instantly while benchmark lines are dragged; the
 * parity test pins it against the server's /tradeoff response. Meeting a
 * benchmark is inclusive on both axes, and an unreachable objective
 * enters as infinite cost. */

export type TradeoffRegion = "Continue" | "DrillDown" | "ThinkTwice" | "Close";

export interface Benchmarks {
  /** Minimal acceptable bug-detection share, in (0, 1]. */
  quality: number;
  /** Maximal acceptable extra reports to the next objective, >= 0. */
  cost: number;
}

export function classifyTradeoff(
  achievedPct: number,
  nextObjectiveCost: number,
  benchmarks: Benchmarks
): TradeoffRegion {
  if (Number.isNaN(achievedPct) || Number.isNaN(nextObjectiveCost)) {
    throw new Error("inputs must be numbers (unreachable cost is +Infinity)");
  }
  const qualityMet = achievedPct >= benchmarks.quality;
  const affordable = nextObjectiveCost <= benchmarks.cost;
  if (qualityMet) {
    return affordable ? "ThinkTwice" : "Close";
  }
  return affordable ? "Continue" : "DrillDown";
}

export const REGION_COLORS: Record<TradeoffRegion, string> = {
  Continue: "#2e9e44",
  DrillDown: "#e08a00",
  ThinkTwice: "#2a6fdb",
  Close: "#d24343",
};
