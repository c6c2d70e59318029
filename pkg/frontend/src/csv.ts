/** CSV ingestion for the sweep result files. */

import * as fs from "fs";
import Papa from "papaparse";

export interface CsvTable {
  /** Header names in file order. */
  fields: string[];
  /** One record per data row; empty cells come through as "". */
  rows: Record<string, string>[];
}

export function readCsvTable(path: string): CsvTable {
  const text = fs.readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`${path}: ${e.message} (row ${e.row ?? "?"})`);
  }
  return { fields: parsed.meta.fields ?? [], rows: parsed.data };
}
