import { z } from "zod";

// The wire contract consumed by the classification pipeline
// (docs/schemas/label_document.schema.json in the main package).

export const DetectionSchema = z.object({
  label: z.string(),
  confidence: z.number().min(0).max(1),
  bbox: z.tuple([z.number(), z.number(), z.number(), z.number()]),
});

export const LabelDocumentSchema = z.object({
  image_id: z.string(),
  labels: z.array(z.string()),
  detections: z.array(DetectionSchema),
});

export type Detection = z.infer<typeof DetectionSchema>;
export type LabelDocument = z.infer<typeof LabelDocumentSchema>;

/**
 * Assemble the document from raw detections: labels are lowercased and
 * deduplicated (one code per object type, however many instances), while
 * every instance stays listed under `detections`.
 */
export function buildLabelDocument(
  imageId: string,
  detections: Detection[],
): LabelDocument {
  const normalized = detections.map((det) => ({
    label: det.label.trim().toLowerCase(),
    confidence: det.confidence,
    bbox: det.bbox,
  }));
  const labels = [...new Set(normalized.map((det) => det.label))].sort();
  return LabelDocumentSchema.parse({
    image_id: imageId,
    labels,
    detections: normalized,
  });
}

/** Clamp a [x, y, w, h] box to the image bounds; null when nothing is left. */
export function clampBbox(
  bbox: [number, number, number, number],
  width: number,
  height: number,
): [number, number, number, number] | null {
  const [x, y, w, h] = bbox;
  const x0 = Math.min(Math.max(x, 0), width);
  const y0 = Math.min(Math.max(y, 0), height);
  const x1 = Math.min(Math.max(x + w, 0), width);
  const y1 = Math.min(Math.max(y + h, 0), height);
  if (x1 - x0 <= 0 || y1 - y0 <= 0) {
    return null;
  }
  return [x0, y0, x1 - x0, y1 - y0];
}
