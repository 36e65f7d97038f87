#!/usr/bin/env node
/**
 * Command line entry point.
 *
 *   netfdi-figures render <sweep.csv> [--out-dir DIR] [--figures a,b] [--png]
 *   netfdi-figures render-all <dir> [--out-dir DIR] [--png]
 *
 * Exit codes follow the producer's convention: 0 on success, 2 on bad
 * input, which includes schema violations; diagnostics go to stderr with
 * an `error:` prefix.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { parseArgs } from "node:util";
import { parseSweepCsv, SchemaError } from "./schema.js";
import { buildAllFigures, FIGURES } from "./figures.js";
import { renderFigure, type RenderOptions } from "./svg.js";

const USAGE = `usage: netfdi-figures <command> [options]

commands:
  render <sweep.csv>   render figures for one sweep CSV
  render-all <dir>     render figures for every *.csv in a directory

options:
  --out-dir DIR   output directory (default: alongside the input)
  --figures LIST  comma separated figure keys (default: all)
                  known keys: ${FIGURES.map((d) => d.key).join(", ")}
  --png           also rasterize each figure to PNG
  --width N       figure width in pixels (default 640)
  --height N      figure height in pixels (default 420)
`;

class CliError extends Error {}

const PARSE_SPEC = {
  allowPositionals: true,
  options: {
    "out-dir": { type: "string" },
    figures: { type: "string" },
    png: { type: "boolean", default: false },
    width: { type: "string" },
    height: { type: "string" },
    help: { type: "boolean", default: false },
  },
} as const;

interface Options {
  outDir?: string;
  figures?: string[];
  png: boolean;
  render: RenderOptions;
}

function parsePositiveInt(raw: string, flag: string): number {
  const value = Number(raw);
  if (!Number.isInteger(value) || value <= 0) {
    throw new CliError(`${flag} must be a positive integer, got '${raw}'`);
  }
  return value;
}

async function rasterize(svg: string): Promise<Buffer> {
  let resvg: typeof import("@resvg/resvg-js");
  try {
    resvg = await import("@resvg/resvg-js");
  } catch {
    throw new CliError(
      "png output needs the @resvg/resvg-js native module, " +
        "which failed to load; rerun without --png",
    );
  }
  return new resvg.Resvg(svg).render().asPng();
}

/** Render one CSV; returns the paths written. */
async function renderFile(input: string, opts: Options): Promise<string[]> {
  let text: string;
  try {
    text = fs.readFileSync(input, "utf-8");
  } catch (err) {
    throw new CliError(`cannot read '${input}': ${(err as Error).message}`);
  }
  const rows = parseSweepCsv(text, input);
  const outDir = opts.outDir ?? path.dirname(input);
  fs.mkdirSync(outDir, { recursive: true });
  const stem = path.basename(input).replace(/\.csv$/i, "");
  const written: string[] = [];
  for (const { def, spec } of buildAllFigures(rows, opts.figures)) {
    const svg = renderFigure(spec, opts.render);
    const svgPath = path.join(outDir, `${stem}__${def.key}.svg`);
    fs.writeFileSync(svgPath, svg, "utf-8");
    written.push(svgPath);
    if (opts.png) {
      const pngPath = path.join(outDir, `${stem}__${def.key}.png`);
      fs.writeFileSync(pngPath, await rasterize(svg));
      written.push(pngPath);
    }
  }
  return written;
}

function safeParseArgs(argv: string[]) {
  try {
    return parseArgs({ ...PARSE_SPEC, args: argv });
  } catch (err) {
    throw new CliError((err as Error).message);
  }
}

async function run(argv: string[]): Promise<void> {
  const { values, positionals } = safeParseArgs(argv);
  if (values.help || positionals.length === 0) {
    process.stdout.write(USAGE);
    if (!values.help) throw new CliError("missing command");
    return;
  }
  const [command, target] = positionals;
  if (positionals.length !== 2 || target === undefined) {
    throw new CliError(`'${command}' takes exactly one argument`);
  }
  const render: RenderOptions = {};
  if (values.width !== undefined) {
    render.width = parsePositiveInt(values.width, "--width");
  }
  if (values.height !== undefined) {
    render.height = parsePositiveInt(values.height, "--height");
  }
  const opts: Options = {
    png: values.png,
    render,
  };
  if (values["out-dir"] !== undefined) opts.outDir = values["out-dir"];
  if (values.figures !== undefined) {
    const keys = values.figures.split(",").map((k) => k.trim());
    const known = new Set(FIGURES.map((d) => d.key));
    const bad = keys.filter((k) => !known.has(k));
    if (bad.length > 0) {
      throw new CliError(
        `unknown figure key(s) ${bad.join(", ")}; ` +
          `known: ${[...known].join(", ")}`,
      );
    }
    opts.figures = keys;
  }

  let inputs: string[];
  if (command === "render") {
    inputs = [target];
  } else if (command === "render-all") {
    let names: string[];
    try {
      names = fs.readdirSync(target);
    } catch (err) {
      throw new CliError(`cannot list '${target}': ${(err as Error).message}`);
    }
    inputs = names
      .filter((f) => f.toLowerCase().endsWith(".csv"))
      .sort()
      .map((f) => path.join(target, f));
    if (inputs.length === 0) {
      throw new CliError(`no *.csv files in '${target}'`);
    }
  } else {
    throw new CliError(`unknown command '${command}'`);
  }

  for (const input of inputs) {
    for (const written of await renderFile(input, opts)) {
      process.stdout.write(`wrote ${written}\n`);
    }
  }
}

run(process.argv.slice(2)).catch((err: unknown) => {
  if (err instanceof CliError || err instanceof SchemaError) {
    process.stderr.write(`error: ${err.message}\n`);
    process.exitCode = 2;
  } else {
    process.stderr.write(`error: ${String(err)}\n`);
    process.exitCode = 1;
  }
});
