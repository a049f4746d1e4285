#!/usr/bin/env node
// Turn one image into the LabelDocument JSON the classification pipeline
// consumes:
//
//   detect.js --image FILE [--model SPEC] [--conf THRESHOLD]
//
// The document goes to stdout; any failure prints {"error": ...} and
// exits nonzero.  Model weights are never bundled: point --model at a
// TensorFlow.js graph model, or at "stub:detections.json" for the
// deterministic replay backend.

import { readFileSync } from "node:fs";
import { basename } from "node:path";

import { resolveBackend } from "./backends.js";
import { buildLabelDocument } from "./labelDocument.js";
import { decodePng } from "./png.js";

interface CliArgs {
  image: string;
  model?: string;
  conf: number;
}

export function parseArgs(argv: string[]): CliArgs {
  let image: string | undefined;
  let model: string | undefined;
  let conf = 0.25;
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    if (flag === "--image" || flag === "--model" || flag === "--conf") {
      const value = argv[++i];
      if (value === undefined) {
        throw new Error(`missing value for ${flag}`);
      }
      if (flag === "--image") image = value;
      else if (flag === "--model") model = value;
      else {
        conf = Number(value);
        if (!Number.isFinite(conf) || conf < 0 || conf > 1) {
          throw new Error(`--conf must be a number in [0, 1], got ${value}`);
        }
      }
    } else {
      throw new Error(`unknown argument ${flag}`);
    }
  }
  if (!image) {
    throw new Error("--image is required");
  }
  return { image, model, conf };
}

export async function run(argv: string[]): Promise<number> {
  try {
    const args = parseArgs(argv);
    if (!args.model) {
      throw new Error(
        "--model is required (a tfjs graph model path, or stub:detections.json); no weights are bundled",
      );
    }
    let buffer: Buffer;
    try {
      buffer = readFileSync(args.image);
    } catch (err) {
      throw new Error(`cannot read image ${args.image}: ${(err as Error).message}`);
    }
    const image = decodePng(buffer);
    const backend = resolveBackend(args.model);
    const detections = await backend.detect(image, args.image, args.conf);
    const document = buildLabelDocument(basename(args.image), detections);
    process.stdout.write(JSON.stringify(document) + "\n");
    return 0;
  } catch (err) {
    process.stdout.write(JSON.stringify({ error: (err as Error).message }) + "\n");
    return 1;
  }
}

const isMain =
  process.argv[1] !== undefined && import.meta.url.endsWith(basename(process.argv[1]));
if (isMain) {
  run(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
