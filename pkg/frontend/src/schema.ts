/**
 * Reader for the netfdi sweep CSV export.
 *
 * The producer writes one tag line `# netfdi-sweep-v1`, one header line with
 * a fixed column order, and one row per generated instance. Cells never
 * contain commas or quotes, so a plain split is an exact parse. Everything
 * else about the file is validated here and violations surface as
 * SchemaError with a file-and-line diagnostic.
 */

export const SCHEMA_TAG = "netfdi-sweep-v1";

export const SWEEP_COLUMNS = [
  "family",
  "param_name",
  "param_value",
  "instance",
  "seed",
  "n",
  "edges",
  "diameter",
  "z",
  "md_size",
  "mi_size",
  "fi_residual_mi",
  "fi_residual_all",
  "feasible",
] as const;

export type SweepColumn = (typeof SWEEP_COLUMNS)[number];

/** One instance row, with cells coerced to their documented types. */
export interface SweepRow {
  /** Series label, `<family>-<variant>`, e.g. `erdos_renyi-directed`. */
  family: string;
  /** Name of the swept parameter, e.g. `p`, `n`, `rewire_p`. */
  paramName: string;
  /** Value of the swept parameter for this instance. */
  paramValue: number;
  /** Instance index within the swept value. */
  instance: number;
  /** Generator seed for the instance. */
  seed: number;
  /** Node count. */
  n: number;
  /** Arc count. */
  edges: number;
  /** Directed diameter; Infinity when some pair is unreachable. */
  diameter: number;
  /** Maximum derivative order used when building relations. */
  z: number;
  /** Greedy detection sensor count (0 when detection failed). */
  mdSize: number;
  /** Greedy isolation sensor count (0 when isolation infeasible). */
  miSize: number;
  /** Unresolved classes with the placed isolation set. */
  fiResidualMi: number;
  /** Unresolved classes with sensors on every node. */
  fiResidualAll: number;
  /** Whether the requested placement succeeded end to end. */
  feasible: boolean;
}

/** Validation failure with the offending source location attached. */
export class SchemaError extends Error {
  readonly source: string;
  readonly line: number;

  constructor(source: string, line: number, detail: string) {
    super(`${source}:${line}: ${detail}`);
    this.name = "SchemaError";
    this.source = source;
    this.line = line;
  }
}

/** Integer-valued columns; everything numeric except param_value. */
const INT_COLUMNS: ReadonlySet<SweepColumn> = new Set([
  "instance",
  "seed",
  "n",
  "edges",
  "z",
  "md_size",
  "mi_size",
  "fi_residual_mi",
  "fi_residual_all",
]);

/**
 * Parse one numeric cell. The producer formats cells with Python str(), so
 * an unreachable diameter arrives as the literal `inf`.
 */
function parseNumericCell(
  raw: string,
  column: SweepColumn,
  source: string,
  line: number,
): number {
  if (raw === "inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  if (raw === "" || raw === "nan") {
    throw new SchemaError(source, line, `column '${column}' is empty or nan`);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new SchemaError(
      source,
      line,
      `column '${column}' is not numeric: '${raw}'`,
    );
  }
  if (INT_COLUMNS.has(column) && !Number.isInteger(value)) {
    throw new SchemaError(
      source,
      line,
      `column '${column}' must be an integer: '${raw}'`,
    );
  }
  return value;
}

function headerDiagnostic(got: string[]): string {
  const expected = SWEEP_COLUMNS as readonly string[];
  const missing = expected.filter((c) => !got.includes(c));
  const unexpected = got.filter((c) => !expected.includes(c));
  const parts: string[] = [];
  if (missing.length > 0) parts.push(`missing column(s) ${missing.join(", ")}`);
  if (unexpected.length > 0) {
    parts.push(`unexpected column(s) ${unexpected.join(", ")}`);
  }
  if (parts.length === 0) parts.push("columns are out of order");
  return `bad header: ${parts.join("; ")} (expected '${expected.join(",")}')`;
}

/**
 * Parse the full text of a sweep CSV into typed rows.
 *
 * @param text Raw file contents.
 * @param source Label used in diagnostics, typically the file path.
 * @returns Rows in file order; several series may share one file and are
 *   told apart by the family column.
 * @throws SchemaError on any deviation from the netfdi-sweep-v1 layout.
 */
export function parseSweepCsv(text: string, source = "<csv>"): SweepRow[] {
  const lines = text.split(/\r?\n/);
  if (lines.length === 0 || (lines[0] ?? "").trim() !== `# ${SCHEMA_TAG}`) {
    throw new SchemaError(
      source,
      1,
      `missing schema tag: first line must be '# ${SCHEMA_TAG}', ` +
        `got '${(lines[0] ?? "").trim()}'`,
    );
  }
  const headerLine = (lines[1] ?? "").trim();
  const got = headerLine === "" ? [] : headerLine.split(",");
  if (headerLine !== SWEEP_COLUMNS.join(",")) {
    throw new SchemaError(source, 2, headerDiagnostic(got));
  }

  const rows: SweepRow[] = [];
  for (let i = 2; i < lines.length; i++) {
    const line = (lines[i] ?? "").trim();
    if (line === "") continue;
    const lineNo = i + 1;
    const cells = line.split(",");
    if (cells.length !== SWEEP_COLUMNS.length) {
      throw new SchemaError(
        source,
        lineNo,
        `expected ${SWEEP_COLUMNS.length} fields, got ${cells.length}`,
      );
    }
    const cell = (c: SweepColumn): string =>
      cells[SWEEP_COLUMNS.indexOf(c)] as string;
    const family = cell("family");
    const paramName = cell("param_name");
    if (family === "") {
      throw new SchemaError(source, lineNo, "column 'family' is empty");
    }
    if (paramName === "") {
      throw new SchemaError(source, lineNo, "column 'param_name' is empty");
    }
    const num = (c: SweepColumn): number =>
      parseNumericCell(cell(c), c, source, lineNo);
    const feasibleRaw = cell("feasible");
    if (feasibleRaw !== "0" && feasibleRaw !== "1") {
      throw new SchemaError(
        source,
        lineNo,
        `column 'feasible' must be 0 or 1: '${feasibleRaw}'`,
      );
    }
    rows.push({
      family,
      paramName,
      paramValue: num("param_value"),
      instance: num("instance"),
      seed: num("seed"),
      n: num("n"),
      edges: num("edges"),
      diameter: num("diameter"),
      z: num("z"),
      mdSize: num("md_size"),
      miSize: num("mi_size"),
      fiResidualMi: num("fi_residual_mi"),
      fiResidualAll: num("fi_residual_all"),
      feasible: feasibleRaw === "1",
    });
  }
  if (rows.length === 0) {
    throw new SchemaError(source, lines.length, "no data rows");
  }
  return rows;
}
