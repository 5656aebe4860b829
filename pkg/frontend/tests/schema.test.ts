import { readFileSync } from "fs";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { parseExponentsCsv, parseL2Csv, SchemaError } from "../src/schema";

const fixture = (name: string) =>
  readFileSync(join(__dirname, "fixtures", name), "utf8");

describe("parseExponentsCsv", () => {
  it("parses the kerf exponents output", () => {
    const rows = parseExponentsCsv(fixture("exponents.csv"));
    expect(rows).toHaveLength(10);
    expect(rows[0].variant).toBe("centered");
    expect(rows[0].d).toBe(1);
    expect(rows[0].newRate).toBeCloseTo(0.5906161091496412, 12);
    for (const row of rows) {
      expect(row.minimax).toBeGreaterThanOrEqual(row.newRate);
      expect(row.newRate).toBeGreaterThan(row.previous);
    }
  });

  it("names a missing column", () => {
    expect(() => parseExponentsCsv("variant,d,previous,minimax\nc,1,0.1,0.5\n")).toThrow(
      /"new"/,
    );
  });

  it("names a non-numeric column", () => {
    const text = "variant,d,previous,new,minimax\ncentered,1,0.1,oops,0.5\n";
    try {
      parseExponentsCsv(text);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).column).toBe("new");
    }
  });

  it("rejects an empty CSV", () => {
    expect(() => parseExponentsCsv("")).toThrow(SchemaError);
    expect(() => parseExponentsCsv("variant,d,previous,new,minimax\n")).toThrow(
      /no data rows/,
    );
  });
});

describe("parseL2Csv", () => {
  it("parses the kerf experiment output", () => {
    const rows = parseL2Csv(fixture("l2_rows.csv"));
    expect(rows).toHaveLength(45); // 3 n-values x 3 rules x 5 seeds
    expect(new Set(rows.map((r) => r.rule))).toEqual(
      new Set(["scornet", "improved", "interpolation"]),
    );
    for (const row of rows) {
      expect(row.l2Error).toBeGreaterThanOrEqual(0);
    }
  });

  it("requires the full documented header", () => {
    expect(() => parseL2Csv("variant,rule,n,k,seed,l2_error\nc,r,10,1,0,0.5\n")).toThrow(
      /"wall_time_ms"/,
    );
  });
});
