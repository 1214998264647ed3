import Papa from "papaparse";

/** A required column is absent or a cell cannot be read as expected. */
export class SchemaError extends Error {}

/** The file parsed fine but holds no data rows. */
export class EmptyInputError extends Error {}

export interface Table {
  header: string[];
  rows: Record<string, string>[];
}

/**
 * Parse one of the experiment CSVs.  Lines starting with `#` (the
 * config-hash stamp) and blank lines are skipped; the first remaining
 * line is the header.
 */
export function parseTable(text: string, source: string): Table {
  const parsed = Papa.parse<string[]>(text, {
    comments: "#",
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(`${source}: ${first.message}`);
  }
  const [header, ...body] = parsed.data;
  if (header === undefined || header.length === 0) {
    throw new EmptyInputError(`${source}: no header row`);
  }
  if (body.length === 0) {
    throw new EmptyInputError(`${source}: no data rows`);
  }
  const rows = body.map((cells, i) => {
    if (cells.length !== header.length) {
      throw new SchemaError(
        `${source}: row ${i + 1} has ${cells.length} fields, expected ${header.length}`,
      );
    }
    return Object.fromEntries(header.map((name, j) => [name, cells[j]!]));
  });
  return { header, rows };
}

export function requireColumns(
  table: Table,
  columns: string[],
  source: string,
): void {
  for (const column of columns) {
    if (!table.header.includes(column)) {
      throw new SchemaError(`${source}: missing required column "${column}"`);
    }
  }
}

export function numeric(
  row: Record<string, string>,
  column: string,
  source: string,
): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(
      `${source}: column "${column}" has non-numeric value "${row[column]}"`,
    );
  }
  return value;
}
