import { describe, expect, it } from "vitest";

import { parseDiagnosticsCsv } from "../src/csv.js";

const HEADER = "t,mass,momentum,e_kin,e_ele,e_tot,rank,sv0,sv1,sv2";

describe("parseDiagnosticsCsv", () => {
  it("reads rows and the ragged sv tail", () => {
    const text = [
      HEADER,
      "0,12.5,0,6.28,0.0012,6.2812,1,1.88,,",
      "0.5,12.5,1e-13,6.28,0.0009,6.2809,3,1.88,0.004,2e-05",
      "",
    ].join("\n");
    const run = parseDiagnosticsCsv(text, "demo");
    expect(run.label).toBe("demo");
    expect(run.svWidth).toBe(3);
    expect(run.rows).toHaveLength(2);
    expect(run.rows[0].sv).toEqual([1.88]);
    expect(run.rows[1].rank).toBe(3);
    expect(run.rows[1].sv).toEqual([1.88, 0.004, 2e-5]);
    expect(run.rows[1].eEle).toBeCloseTo(0.0009, 12);
  });

  it("accepts a header-only file as an empty run", () => {
    const run = parseDiagnosticsCsv(HEADER + "\n");
    expect(run.rows).toHaveLength(0);
    expect(run.svWidth).toBe(3);
  });

  it("rejects a wrong header", () => {
    expect(() => parseDiagnosticsCsv("t,mass,oops\n")).toThrow(/line 1.*momentum/);
    expect(() => parseDiagnosticsCsv(HEADER.replace("sv1", "sv7") + "\n")).toThrow(
      /expected column 'sv1'/,
    );
  });

  it("rejects malformed rows with the line number", () => {
    expect(() =>
      parseDiagnosticsCsv([HEADER, "0,1,2,3,4,5,1,0.1,,", "1,2,3", ""].join("\n")),
    ).toThrow(/line 3: expected 10 fields, got 3/);
    expect(() =>
      parseDiagnosticsCsv([HEADER, "0,1,2,xyz,4,5,1,0.1,,", ""].join("\n")),
    ).toThrow(/line 2: bad number 'xyz' in column 'e_kin'/);
    expect(() =>
      parseDiagnosticsCsv([HEADER, "0,1,2,3,4,5,1.5,0.1,,", ""].join("\n")),
    ).toThrow(/line 2: bad rank/);
    expect(() =>
      parseDiagnosticsCsv([HEADER, "0,1,2,3,4,5,1,0.1,,3e-9", ""].join("\n")),
    ).toThrow(/line 2: non-blank field after blank sv tail/);
  });

  it("rejects an empty file", () => {
    expect(() => parseDiagnosticsCsv("")).toThrow(/empty diagnostics file/);
  });
});
