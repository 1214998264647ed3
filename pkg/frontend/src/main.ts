#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { EmptyInputError, SchemaError } from "./csv.js";
import { PlotKind, render } from "./plots.js";

const KINDS: PlotKind[] = ["rate_loglog", "fractions_bars", "curve_overlay"];

export function run(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("plots")
    .command("$0 <kind>", "render an experiment CSV to an SVG figure", (y) =>
      y.positional("kind", {
        choices: KINDS,
        describe: "which figure to render",
        type: "string",
        demandOption: true,
      }),
    )
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "input CSV (rate.csv, fractions.csv, or errors.csv)",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("guide", {
      type: "number",
      default: 0.25,
      describe: "slope of the dashed guide line on the log-log plot",
    })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new Error(msg);
    })
    .parseSync();

  let input: string;
  try {
    input = readFileSync(args.in, "utf8");
  } catch (error) {
    console.error(`cannot read ${args.in}: ${(error as Error).message}`);
    return 1;
  }
  let svg: string;
  try {
    svg = render({
      kind: args.kind as PlotKind,
      input,
      source: args.in,
      guideExponent: args.guide,
    });
  } catch (error) {
    if (error instanceof SchemaError || error instanceof EmptyInputError) {
      console.error(error.message);
      return 1;
    }
    throw error;
  }
  try {
    writeFileSync(args.out, svg);
  } catch (error) {
    console.error(`cannot write ${args.out}: ${(error as Error).message}`);
    return 1;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  try {
    process.exit(run(hideBin(process.argv)));
  } catch (error) {
    console.error((error as Error).message);
    process.exit(1);
  }
}
