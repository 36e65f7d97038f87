/**
 * Figure catalog: which metrics are plotted and how axes are labelled.
 */

import type { SweepRow } from "./schema.js";
import { seriesPoints, type MetricKey } from "./stats.js";
import type { FigureSpec } from "./svg.js";

/** One entry of the figure catalog. */
export interface FigureDef {
  /** File-name-safe key, used as the output suffix. */
  key: string;
  metric: MetricKey;
  yLabel: string;
}

export const FIGURES: readonly FigureDef[] = [
  { key: "diameter", metric: "diameter", yLabel: "graph diameter" },
  { key: "max-order", metric: "z", yLabel: "maximum derivative order" },
  { key: "md-size", metric: "mdSize", yLabel: "detection sensor count" },
  { key: "mi-size", metric: "miSize", yLabel: "isolation sensor count" },
  {
    key: "fi-residual",
    metric: "fiResidualAll",
    yLabel: "unresolved classes, all nodes",
  },
];

const PARAM_LABELS: Record<string, string> = {
  n: "network size n",
  p: "edge probability p",
  rewire_p: "rewiring probability",
  d: "lattice degree d",
  radius: "connection radius",
  edges: "undirected edge count",
};

/** Human x-axis label for a swept parameter name. */
export function paramLabel(paramName: string): string {
  return PARAM_LABELS[paramName] ?? paramName;
}

/**
 * Build the spec for one catalog entry from parsed rows.
 *
 * All rows of a file share one swept parameter; the first row names it.
 */
export function buildFigure(
  rows: readonly SweepRow[],
  def: FigureDef,
): FigureSpec {
  if (rows.length === 0) throw new Error("no rows to plot");
  const paramName = (rows[0] as SweepRow).paramName;
  const series = [...seriesPoints(rows, def.metric)].map(
    ([name, points]) => ({ name, points }),
  );
  return {
    title: `${def.yLabel} vs ${paramLabel(paramName)}`,
    xLabel: paramLabel(paramName),
    yLabel: def.yLabel,
    series,
  };
}

/** Build every catalog figure for the given rows. */
export function buildAllFigures(
  rows: readonly SweepRow[],
  only?: readonly string[],
): { def: FigureDef; spec: FigureSpec }[] {
  const defs =
    only === undefined ? FIGURES : FIGURES.filter((d) => only.includes(d.key));
  if (only !== undefined) {
    const known = new Set(FIGURES.map((d) => d.key));
    const bad = only.filter((k) => !known.has(k));
    if (bad.length > 0) {
      throw new Error(
        `unknown figure key(s) ${bad.join(", ")}; ` +
          `known: ${FIGURES.map((d) => d.key).join(", ")}`,
      );
    }
  }
  return defs.map((def) => ({ def, spec: buildFigure(rows, def) }));
}
