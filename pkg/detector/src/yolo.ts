import type { RasterImage } from "./png.js";

// Pre/post-processing for single-stage detector graphs exported to
// TensorFlow.js (YOLOv8-style layout).  Everything here is pure array
// math so it can be tested without model weights.

export const COCO_CLASSES = [
  "person", "bicycle", "car", "motorcycle", "airplane", "bus", "train",
  "truck", "boat", "traffic light", "fire hydrant", "stop sign",
  "parking meter", "bench", "bird", "cat", "dog", "horse", "sheep", "cow",
  "elephant", "bear", "zebra", "giraffe", "backpack", "umbrella",
  "handbag", "tie", "suitcase", "frisbee", "skis", "snowboard",
  "sports ball", "kite", "baseball bat", "baseball glove", "skateboard",
  "surfboard", "tennis racket", "bottle", "wine glass", "cup", "fork",
  "knife", "spoon", "bowl", "banana", "apple", "sandwich", "orange",
  "broccoli", "carrot", "hot dog", "pizza", "donut", "cake", "chair",
  "couch", "potted plant", "bed", "dining table", "toilet", "tv",
  "laptop", "mouse", "remote", "keyboard", "cell phone", "microwave",
  "oven", "toaster", "sink", "refrigerator", "book", "clock", "vase",
  "scissors", "teddy bear", "hair drier", "toothbrush",
];

export interface LetterboxResult {
  /** Normalized RGB, [size * size * 3], row-major. */
  data: Float32Array;
  gain: number;
  padX: number;
  padY: number;
}

/**
 * Scale the image to fit a square canvas while keeping aspect ratio,
 * centering it on a neutral gray background (the standard detector
 * input convention).  Bilinear sampling.
 */
export function letterbox(image: RasterImage, size = 640): LetterboxResult {
  const gain = Math.min(size / image.width, size / image.height);
  const newW = Math.round(image.width * gain);
  const newH = Math.round(image.height * gain);
  const padX = Math.floor((size - newW) / 2);
  const padY = Math.floor((size - newH) / 2);

  const data = new Float32Array(size * size * 3).fill(114 / 255);
  for (let y = 0; y < newH; y++) {
    const srcY = Math.min(((y + 0.5) / gain) - 0.5, image.height - 1);
    const y0 = Math.max(Math.floor(srcY), 0);
    const y1 = Math.min(y0 + 1, image.height - 1);
    const fy = srcY - y0;
    for (let x = 0; x < newW; x++) {
      const srcX = Math.min(((x + 0.5) / gain) - 0.5, image.width - 1);
      const x0 = Math.max(Math.floor(srcX), 0);
      const x1 = Math.min(x0 + 1, image.width - 1);
      const fx = srcX - x0;
      const dst = ((y + padY) * size + (x + padX)) * 3;
      for (let c = 0; c < 3; c++) {
        const p00 = image.data[(y0 * image.width + x0) * 4 + c];
        const p01 = image.data[(y0 * image.width + x1) * 4 + c];
        const p10 = image.data[(y1 * image.width + x0) * 4 + c];
        const p11 = image.data[(y1 * image.width + x1) * 4 + c];
        const top = p00 + (p01 - p00) * fx;
        const bottom = p10 + (p11 - p10) * fx;
        data[dst + c] = (top + (bottom - top) * fy) / 255;
      }
    }
  }
  return { data, gain, padX, padY };
}

export interface CandidateBox {
  /** xyxy in letterboxed input pixels. */
  x0: number;
  y0: number;
  x1: number;
  y1: number;
  score: number;
  classId: number;
}

/**
 * Decode a [1, 4 + numClasses, numAnchors] output tensor: per anchor a
 * center-format box plus one probability per class.  Keeps the best
 * class per anchor when it clears the confidence threshold.
 */
export function decodeOutput(
  data: Float32Array | number[],
  channels: number,
  anchors: number,
  confThreshold: number,
): CandidateBox[] {
  const numClasses = channels - 4;
  if (numClasses < 1) {
    throw new Error(`output has ${channels} channels, expected at least 5`);
  }
  const boxes: CandidateBox[] = [];
  for (let a = 0; a < anchors; a++) {
    let best = 0;
    let bestClass = -1;
    for (let c = 0; c < numClasses; c++) {
      const score = data[(4 + c) * anchors + a] as number;
      if (score > best) {
        best = score;
        bestClass = c;
      }
    }
    if (best < confThreshold || bestClass < 0) {
      continue;
    }
    const cx = data[a] as number;
    const cy = data[anchors + a] as number;
    const w = data[2 * anchors + a] as number;
    const h = data[3 * anchors + a] as number;
    boxes.push({
      x0: cx - w / 2,
      y0: cy - h / 2,
      x1: cx + w / 2,
      y1: cy + h / 2,
      score: best,
      classId: bestClass,
    });
  }
  return boxes;
}

export function iou(a: CandidateBox, b: CandidateBox): number {
  const ix0 = Math.max(a.x0, b.x0);
  const iy0 = Math.max(a.y0, b.y0);
  const ix1 = Math.min(a.x1, b.x1);
  const iy1 = Math.min(a.y1, b.y1);
  const iw = Math.max(ix1 - ix0, 0);
  const ih = Math.max(iy1 - iy0, 0);
  const inter = iw * ih;
  if (inter === 0) {
    return 0;
  }
  const areaA = (a.x1 - a.x0) * (a.y1 - a.y0);
  const areaB = (b.x1 - b.x0) * (b.y1 - b.y0);
  return inter / (areaA + areaB - inter);
}

/** Greedy per-class non-maximum suppression, highest score first. */
export function nms(boxes: CandidateBox[], iouThreshold = 0.45): CandidateBox[] {
  const kept: CandidateBox[] = [];
  const sorted = [...boxes].sort((a, b) => b.score - a.score);
  for (const box of sorted) {
    const clashes = kept.some(
      (other) => other.classId === box.classId && iou(other, box) > iouThreshold,
    );
    if (!clashes) {
      kept.push(box);
    }
  }
  return kept;
}

export interface DetectionBox {
  label: string;
  confidence: number;
  bbox: [number, number, number, number];
}

/**
 * Map letterboxed xyxy boxes back to original image pixels and attach
 * class names; boxes are clamped to the image and emitted as [x, y, w, h].
 */
export function toImageSpace(
  boxes: CandidateBox[],
  gain: number,
  padX: number,
  padY: number,
  width: number,
  height: number,
  classNames: string[] = COCO_CLASSES,
): DetectionBox[] {
  const out: DetectionBox[] = [];
  for (const box of boxes) {
    const x0 = Math.min(Math.max((box.x0 - padX) / gain, 0), width);
    const y0 = Math.min(Math.max((box.y0 - padY) / gain, 0), height);
    const x1 = Math.min(Math.max((box.x1 - padX) / gain, 0), width);
    const y1 = Math.min(Math.max((box.y1 - padY) / gain, 0), height);
    if (x1 - x0 <= 0 || y1 - y0 <= 0) {
      continue;
    }
    out.push({
      label: classNames[box.classId] ?? `class_${box.classId}`,
      confidence: Math.min(Math.max(box.score, 0), 1),
      bbox: [x0, y0, x1 - x0, y1 - y0],
    });
  }
  return out;
}
