import { describe, expect, it } from "vitest";

import { decodeRle } from "../src/rle.js";

describe("map run-length decoding", () => {
  it("expands runs in order", () => {
    const cells = decodeRle([[-1, 3], [0, 2], [1, 1]], 6);
    expect(Array.from(cells)).toEqual([-1, -1, -1, 0, 0, 1]);
  });

  it("keeps unknown as -1 through the Int8Array", () => {
    const cells = decodeRle([[-1, 4]], 4);
    expect(cells[0]).toBe(-1);
  });

  it("rejects short payloads", () => {
    expect(() => decodeRle([[0, 3]], 4)).toThrow(/expected 4/);
  });

  it("rejects overruns", () => {
    expect(() => decodeRle([[0, 5]], 4)).toThrow(/overruns/);
  });

  it("handles an empty grid", () => {
    expect(decodeRle([], 0).length).toBe(0);
  });

  it("round-trips a checkerboard", () => {
    const size = 64;
    const runs: [number, number][] = [];
    for (let i = 0; i < size; i++) {
      runs.push([i % 2, 1]);
    }
    const cells = decodeRle(runs, size);
    for (let i = 0; i < size; i++) {
      expect(cells[i]).toBe(i % 2);
    }
  });
});
