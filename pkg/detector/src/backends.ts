import { readFileSync } from "node:fs";
import { basename, dirname, join } from "node:path";

import type { Detection } from "./labelDocument.js";
import { clampBbox } from "./labelDocument.js";
import type { RasterImage } from "./png.js";
import { decodeOutput, letterbox, nms, toImageSpace } from "./yolo.js";

export interface DetectorBackend {
  detect(image: RasterImage, imagePath: string, conf: number): Promise<Detection[]>;
}

/**
 * Pick a backend from the --model spec: "stub:<detections.json>" replays
 * canned detections (deterministic testing/development double), anything
 * else is a path to a TensorFlow.js graph model directory or model.json.
 */
export function resolveBackend(modelSpec: string): DetectorBackend {
  if (modelSpec.startsWith("stub:")) {
    return stubBackend(modelSpec.slice("stub:".length));
  }
  return tfjsBackend(modelSpec);
}

/**
 * Replay detections from a JSON file keyed by image basename.  Entries
 * below the confidence threshold are dropped and boxes are clamped to
 * the actual image bounds, exactly like the model-backed path.
 */
export function stubBackend(specPath: string): DetectorBackend {
  return {
    async detect(image, imagePath, conf) {
      const table = JSON.parse(readFileSync(specPath, "utf-8")) as Record<
        string,
        { label: string; confidence: number; bbox: [number, number, number, number] }[]
      >;
      const entries = table[basename(imagePath)] ?? [];
      const detections: Detection[] = [];
      for (const entry of entries) {
        if (entry.confidence < conf) {
          continue;
        }
        const bbox = clampBbox(entry.bbox, image.width, image.height);
        if (bbox === null) {
          continue;
        }
        detections.push({ label: entry.label, confidence: entry.confidence, bbox });
      }
      return detections;
    },
  };
}

const INPUT_SIZE = 640;
const IOU_THRESHOLD = 0.45;

/**
 * Run a YOLO-style TensorFlow.js graph model: letterbox to the square
 * input, execute, decode the [1, 4+classes, anchors] output, suppress
 * overlaps, and map boxes back to image pixels.  tfjs is imported
 * lazily so stub-backed runs never load it.
 */
export function tfjsBackend(modelPath: string): DetectorBackend {
  return {
    async detect(image, _imagePath, conf) {
      const tf = await import("@tensorflow/tfjs");
      const model = await tf.loadGraphModel(fileIoHandler(modelPath));
      try {
        const { data, gain, padX, padY } = letterbox(image, INPUT_SIZE);
        const input = tf.tensor4d(data, [1, INPUT_SIZE, INPUT_SIZE, 3]);
        const output = model.execute(input) as unknown;
        const tensor = (Array.isArray(output) ? output[0] : output) as {
          shape: number[];
          data(): Promise<Float32Array>;
          dispose(): void;
        };
        const [, channels, anchors] = tensor.shape;
        const values = await tensor.data();
        input.dispose();
        tensor.dispose();
        const boxes = nms(decodeOutput(values, channels, anchors, conf), IOU_THRESHOLD);
        return toImageSpace(boxes, gain, padX, padY, image.width, image.height);
      } finally {
        model.dispose();
      }
    },
  };
}

/**
 * A file-system IOHandler for tf.loadGraphModel: plain tfjs has no
 * file:// support outside the browser, so read model.json and its
 * weight shards with node primitives.
 */
export function fileIoHandler(modelPath: string) {
  const modelJsonPath = modelPath.endsWith(".json")
    ? modelPath
    : join(modelPath, "model.json");
  return {
    load: async () => {
      const modelJson = JSON.parse(readFileSync(modelJsonPath, "utf-8"));
      const dir = dirname(modelJsonPath);
      const manifest = modelJson.weightsManifest ?? [];
      const weightSpecs = manifest.flatMap((group: { weights: unknown[] }) => group.weights);
      const shards: Buffer[] = manifest.flatMap((group: { paths: string[] }) =>
        group.paths.map((p: string) => readFileSync(join(dir, p))),
      );
      const total = shards.reduce((sum, b) => sum + b.length, 0);
      const weightData = new Uint8Array(total);
      let cursor = 0;
      for (const shard of shards) {
        weightData.set(shard, cursor);
        cursor += shard.length;
      }
      return {
        modelTopology: modelJson.modelTopology,
        format: modelJson.format,
        generatedBy: modelJson.generatedBy,
        convertedBy: modelJson.convertedBy,
        weightSpecs,
        weightData: weightData.buffer,
      };
    },
  };
}
