#!/usr/bin/env node
/**
 * plotgen --kind exponents|l2_curves --in <csv> --out <svg>
 *
 * Turns the kerf CLI's CSV outputs into SVG figures. Runs fully headless.
 * On any parse or schema error nothing is written and the exit code is 1.
 */

import { readFileSync, writeFileSync } from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { exponentChartOption, l2ChartOption, renderSvg } from "./charts";
import { parseExponentsCsv, parseL2Csv, SchemaError } from "./schema";

export interface PlotSpec {
  kind: "exponents" | "l2_curves";
  input: string;
  output: string;
  width: number;
  height: number;
}

export function render(spec: PlotSpec): void {
  let text: string;
  try {
    text = readFileSync(spec.input, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${spec.input}: ${(err as Error).message}`);
  }
  const option =
    spec.kind === "exponents"
      ? exponentChartOption(parseExponentsCsv(text))
      : l2ChartOption(parseL2Csv(text));
  const svg = renderSvg(option, spec.width, spec.height);
  writeFileSync(spec.output, svg);
}

export function run(argv: string[]): number {
  const args = yargs(argv)
    .option("kind", {
      choices: ["exponents", "l2_curves"] as const,
      demandOption: true,
      describe: "Figure to render",
    })
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "Input CSV (kerf exponents / kerf experiment output)",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "Output SVG path",
    })
    .option("width", { type: "number", default: 840 })
    .option("height", { type: "number", default: 560 })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new SchemaError(msg);
    })
    .parseSync();
  render({
    kind: args.kind,
    input: args.in,
    output: args.out,
    width: args.width,
    height: args.height,
  });
  return 0;
}

if (require.main === module) {
  try {
    process.exit(run(hideBin(process.argv)));
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`plotgen: ${err.message}`);
    } else {
      console.error(`plotgen: ${(err as Error).stack ?? err}`);
    }
    process.exit(1);
  }
}
