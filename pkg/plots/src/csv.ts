/**
 * Reader for the diagnostics CSV the solver writes: one row per step,
 * `t,mass,momentum,e_kin,e_ele,e_tot,rank,sv0,sv1,...`. The singular
 * value columns are ragged — rows with a smaller rank leave the
 * trailing fields empty.
 */

export interface DiagRow {
  t: number;
  mass: number;
  momentum: number;
  eKin: number;
  eEle: number;
  eTot: number;
  rank: number;
  sv: number[];
}

export interface DiagRun {
  /** basename of the file, used as the legend label */
  label: string;
  rows: DiagRow[];
  /** widest sv block seen in the header */
  svWidth: number;
}

const FIXED_COLUMNS = ["t", "mass", "momentum", "e_kin", "e_ele", "e_tot", "rank"];

export function parseDiagnosticsCsv(text: string, label = "run"): DiagRun {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new Error(`${label}: empty diagnostics file`);
  }

  const header = lines[0].split(",");
  for (let i = 0; i < FIXED_COLUMNS.length; i++) {
    if (header[i] !== FIXED_COLUMNS[i]) {
      throw new Error(
        `${label}: line 1: expected column ${i + 1} to be ` +
          `'${FIXED_COLUMNS[i]}', got '${header[i] ?? ""}'`,
      );
    }
  }
  for (let i = FIXED_COLUMNS.length; i < header.length; i++) {
    const want = `sv${i - FIXED_COLUMNS.length}`;
    if (header[i] !== want) {
      throw new Error(`${label}: line 1: expected column '${want}', got '${header[i]}'`);
    }
  }
  const svWidth = header.length - FIXED_COLUMNS.length;

  const rows: DiagRow[] = [];
  for (let lineno = 2; lineno <= lines.length; lineno++) {
    const fields = lines[lineno - 1].split(",");
    if (fields.length !== header.length) {
      throw new Error(
        `${label}: line ${lineno}: expected ${header.length} fields, got ${fields.length}`,
      );
    }
    const num = (i: number): number => {
      const x = Number(fields[i]);
      if (fields[i] === "" || !Number.isFinite(x)) {
        throw new Error(
          `${label}: line ${lineno}: bad number '${fields[i]}' in column '${header[i]}'`,
        );
      }
      return x;
    };
    const rank = num(6);
    if (!Number.isInteger(rank) || rank < 1) {
      throw new Error(`${label}: line ${lineno}: bad rank '${fields[6]}'`);
    }
    const sv: number[] = [];
    for (let i = FIXED_COLUMNS.length; i < header.length; i++) {
      if (fields[i] === "") {
        break; // ragged tail; everything after the first blank must be blank too
      }
      sv.push(num(i));
    }
    for (let i = FIXED_COLUMNS.length + sv.length; i < header.length; i++) {
      if (fields[i] !== "") {
        throw new Error(`${label}: line ${lineno}: non-blank field after blank sv tail`);
      }
    }
    rows.push({
      t: num(0),
      mass: num(1),
      momentum: num(2),
      eKin: num(3),
      eEle: num(4),
      eTot: num(5),
      rank,
      sv,
    });
  }
  return { label, rows, svWidth };
}
