/** Expand [value, count] runs into the flat trinary cell array,
 * row-major from the lowest-y row. Decoded once per map_version,
 * never per frame.
 */
export function decodeRle(runs: [number, number][], size: number): Int8Array {
  const out = new Int8Array(size);
  let at = 0;
  for (const [value, count] of runs) {
    if (count < 0 || at + count > size) {
      throw new Error(`rle overruns ${size} cells`);
    }
    out.fill(value, at, at + count);
    at += count;
  }
  if (at !== size) {
    throw new Error(`rle decoded ${at} cells, expected ${size}`);
  }
  return out;
}
