import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { decodePng } from "../src/png.js";

const FIXTURES = join(__dirname, "fixtures");

function pixel(image: { width: number; data: Uint8ClampedArray }, x: number, y: number) {
  const i = (y * image.width + x) * 4;
  return [image.data[i], image.data[i + 1], image.data[i + 2], image.data[i + 3]];
}

describe("decodePng", () => {
  it("decodes the RGB pasture fixture", () => {
    const image = decodePng(readFileSync(join(FIXTURES, "two_horses.png")));
    expect(image.width).toBe(320);
    expect(image.height).toBe(200);
    expect(image.data.length).toBe(320 * 200 * 4);
    expect(pixel(image, 0, 0)).toEqual([168, 190, 140, 255]); // background
    expect(pixel(image, 80, 120)).toEqual([92, 61, 42, 255]); // first shape
    expect(pixel(image, 240, 100)).toEqual([70, 48, 33, 255]); // second shape
  });

  it("decodes the blank fixture", () => {
    const image = decodePng(readFileSync(join(FIXTURES, "blank.png")));
    expect(image.width).toBe(64);
    expect(pixel(image, 32, 32)).toEqual([245, 245, 240, 255]);
  });

  it("decodes paletted images", () => {
    const image = decodePng(readFileSync(join(FIXTURES, "palette.png")));
    expect(image.width).toBe(32);
    // palette maps index i to (i, 0, 255 - i); pixel (0,0) has index 0
    expect(pixel(image, 0, 0)).toEqual([0, 0, 255, 255]);
    // pixel (1,0) has index 8
    expect(pixel(image, 1, 0)).toEqual([8, 0, 247, 255]);
  });

  it("rejects non-PNG data", () => {
    expect(() => decodePng(Buffer.from("not a png at all"))).toThrow(/not a PNG/);
  });

  it("rejects truncated data", () => {
    const good = readFileSync(join(FIXTURES, "blank.png"));
    expect(() => decodePng(good.subarray(0, 40))).toThrow();
  });
});
