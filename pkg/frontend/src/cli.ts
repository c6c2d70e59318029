#!/usr/bin/env node
/** figures --in <dir> --kind <pe|latency|txpower|efficiency> --out <file>
 *
 * Renders one SVG boxplot figure from a sweep's CSV directory. On any error
 * (missing column, empty CSV, group without values) a diagnostic goes to
 * stderr, no file is written, and the exit code is 1.
 */

import * as fs from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { buildFigure, FIGURE_KINDS } from "./figures";

export function main(args: string[]): number {
  let argv: { in: string; kind: string; out: string };
  try {
    argv = yargs(args)
      .usage("figures --in <dir> --kind <kind> --out <file>")
      .option("in", {
        type: "string",
        demandOption: true,
        describe: "directory holding per_flow.csv / per_run.csv",
      })
      .option("kind", {
        type: "string",
        demandOption: true,
        describe: FIGURE_KINDS.join("|"),
      })
      .option("out", {
        type: "string",
        demandOption: true,
        describe: "output SVG path",
      })
      .strict()
      .exitProcess(false)
      .parseSync();
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }

  try {
    const figure = buildFigure(argv.in, argv.kind);
    fs.writeFileSync(argv.out, figure.svg);
    console.log(`wrote ${argv.out} (${figure.groups.length} boxes)`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
