#!/usr/bin/env node
/** CLI: cooplocks-plots --csv results.csv --metric throughput --out fig.svg */

import { parseArgs } from "node:util";
import { render } from "./plot.js";
import { Metric } from "./types.js";

const METRICS: Metric[] = ["throughput", "q95_latency", "q99_latency"];

export function main(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        csv: { type: "string" },
        metric: { type: "string", default: "throughput" },
        out: { type: "string" },
        title: { type: "string" },
      },
    }));
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  if (!values.csv || !values.out) {
    console.error(
      "usage: cooplocks-plots --csv results.csv --metric "
      + `<${METRICS.join("|")}> --out fig.svg [--title ...]`,
    );
    return 2;
  }
  const metric = values.metric as Metric;
  if (!METRICS.includes(metric)) {
    console.error(`error: unknown metric ${values.metric}; expected one of ${METRICS.join(", ")}`);
    return 2;
  }
  try {
    render(values.csv, { metric, title: values.title }, values.out);
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 1;
  }
  console.log(`wrote ${values.out}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
