import { inflateSync } from "node:zlib";

// Minimal PNG reader: 8-bit depth, color types 0/2/3/4/6, no interlace.
// Enough to feed artwork scans to the detector without native imaging
// dependencies; anything else is rejected with a clear error.

export interface RasterImage {
  width: number;
  height: number;
  /** RGBA, row-major, 4 bytes per pixel. */
  data: Uint8ClampedArray;
}

const PNG_SIGNATURE = Buffer.from([137, 80, 78, 71, 13, 10, 26, 10]);

export function decodePng(buffer: Buffer): RasterImage {
  if (buffer.length < 8 || !buffer.subarray(0, 8).equals(PNG_SIGNATURE)) {
    throw new Error("not a PNG file");
  }
  let width = 0;
  let height = 0;
  let bitDepth = 0;
  let colorType = 0;
  let interlace = 0;
  let palette: Buffer | null = null;
  let alphaPalette: Buffer | null = null;
  const idat: Buffer[] = [];

  let offset = 8;
  while (offset + 8 <= buffer.length) {
    const length = buffer.readUInt32BE(offset);
    const type = buffer.toString("ascii", offset + 4, offset + 8);
    const body = buffer.subarray(offset + 8, offset + 8 + length);
    if (type === "IHDR") {
      width = body.readUInt32BE(0);
      height = body.readUInt32BE(4);
      bitDepth = body[8];
      colorType = body[9];
      interlace = body[12];
    } else if (type === "PLTE") {
      palette = Buffer.from(body);
    } else if (type === "tRNS") {
      alphaPalette = Buffer.from(body);
    } else if (type === "IDAT") {
      idat.push(Buffer.from(body));
    } else if (type === "IEND") {
      break;
    }
    offset += 12 + length; // length + type + body + crc
  }

  if (width === 0 || height === 0) {
    throw new Error("PNG missing IHDR");
  }
  if (bitDepth !== 8) {
    throw new Error(`unsupported PNG bit depth ${bitDepth}`);
  }
  if (interlace !== 0) {
    throw new Error("interlaced PNG not supported");
  }
  const channels = { 0: 1, 2: 3, 3: 1, 4: 2, 6: 4 }[colorType];
  if (channels === undefined) {
    throw new Error(`unsupported PNG color type ${colorType}`);
  }
  if (idat.length === 0) {
    throw new Error("PNG missing IDAT");
  }

  const raw = inflateSync(Buffer.concat(idat));
  const stride = width * channels;
  const expected = (stride + 1) * height;
  if (raw.length < expected) {
    throw new Error("truncated PNG pixel data");
  }

  const unfiltered = unfilter(raw, width, height, channels);
  return { width, height, data: toRgba(unfiltered, width, height, channels, colorType, palette, alphaPalette) };
}

function unfilter(raw: Buffer, width: number, height: number, channels: number): Uint8Array {
  const stride = width * channels;
  const out = new Uint8Array(stride * height);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)];
    const rowIn = raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1));
    const rowStart = y * stride;
    for (let x = 0; x < stride; x++) {
      const value = rowIn[x];
      const left = x >= channels ? out[rowStart + x - channels] : 0;
      const up = y > 0 ? out[rowStart - stride + x] : 0;
      const upLeft = y > 0 && x >= channels ? out[rowStart - stride + x - channels] : 0;
      let result: number;
      switch (filter) {
        case 0:
          result = value;
          break;
        case 1:
          result = value + left;
          break;
        case 2:
          result = value + up;
          break;
        case 3:
          result = value + ((left + up) >> 1);
          break;
        case 4:
          result = value + paeth(left, up, upLeft);
          break;
        default:
          throw new Error(`unknown PNG filter type ${filter}`);
      }
      out[rowStart + x] = result & 0xff;
    }
  }
  return out;
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

function toRgba(
  pixels: Uint8Array,
  width: number,
  height: number,
  channels: number,
  colorType: number,
  palette: Buffer | null,
  alphaPalette: Buffer | null,
): Uint8ClampedArray {
  const out = new Uint8ClampedArray(width * height * 4);
  const count = width * height;
  for (let i = 0; i < count; i++) {
    const src = i * channels;
    const dst = i * 4;
    if (colorType === 0) {
      out[dst] = out[dst + 1] = out[dst + 2] = pixels[src];
      out[dst + 3] = 255;
    } else if (colorType === 2) {
      out[dst] = pixels[src];
      out[dst + 1] = pixels[src + 1];
      out[dst + 2] = pixels[src + 2];
      out[dst + 3] = 255;
    } else if (colorType === 3) {
      if (!palette) {
        throw new Error("paletted PNG missing PLTE");
      }
      const index = pixels[src] * 3;
      out[dst] = palette[index];
      out[dst + 1] = palette[index + 1];
      out[dst + 2] = palette[index + 2];
      out[dst + 3] = alphaPalette && pixels[src] < alphaPalette.length ? alphaPalette[pixels[src]] : 255;
    } else if (colorType === 4) {
      out[dst] = out[dst + 1] = out[dst + 2] = pixels[src];
      out[dst + 3] = pixels[src + 1];
    } else {
      out[dst] = pixels[src];
      out[dst + 1] = pixels[src + 1];
      out[dst + 2] = pixels[src + 2];
      out[dst + 3] = pixels[src + 3];
    }
  }
  return out;
}
