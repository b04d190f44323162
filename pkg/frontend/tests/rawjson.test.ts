import { describe, expect, it } from "vitest";

import { numberLiteral, numberLiterals, objectLiterals } from "../src/rawjson.js";

describe("raw number extraction", () => {
  it("preserves the exact serialized spelling", () => {
    const raw = '{"results":[{"score":1.0},{"score":0.8500000000000001},{"score":2}]}';
    expect(numberLiterals(raw, "score")).toEqual(["1.0", "0.8500000000000001", "2"]);
    // JSON.parse would lose the ".0": String(1.0) === "1".
    expect(String(JSON.parse('{"s":1.0}').s)).toBe("1");
  });

  it("handles exponents and negatives", () => {
    const raw = '{"overall":-1.5e-07,"other":3}';
    expect(numberLiteral(raw, "overall")).toBe("-1.5e-07");
  });

  it("returns null for null or missing values", () => {
    expect(numberLiteral('{"overall":null}', "overall")).toBeNull();
    expect(numberLiteral("{}", "overall")).toBeNull();
  });

  it("extracts flat object literals with nulls", () => {
    const raw = '{"groups":{"marketing":0.85,"engineering":0.65,"design":null},"support":{}}';
    const groups = objectLiterals(raw, "groups");
    expect(groups.get("marketing")).toBe("0.85");
    expect(groups.get("design")).toBe("null");
    expect(groups.size).toBe(3);
  });
});
