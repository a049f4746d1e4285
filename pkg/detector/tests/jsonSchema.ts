// Just enough draft-07 validation to check outputs against the schema
// files published by the main package (type/object/array/tuple bounds,
// required, enum, additionalProperties, numeric ranges).

type Schema = Record<string, unknown>;

export function validateAgainstSchema(
  value: unknown,
  schema: Schema,
  path = "$",
): string[] {
  const errors: string[] = [];
  const type = schema.type as string | undefined;

  if (type === "object") {
    if (typeof value !== "object" || value === null || Array.isArray(value)) {
      return [`${path}: expected object`];
    }
    const obj = value as Record<string, unknown>;
    for (const key of (schema.required as string[] | undefined) ?? []) {
      if (!(key in obj)) {
        errors.push(`${path}: missing required property '${key}'`);
      }
    }
    const properties = (schema.properties as Record<string, Schema>) ?? {};
    for (const [key, sub] of Object.entries(properties)) {
      if (key in obj) {
        errors.push(...validateAgainstSchema(obj[key], sub, `${path}.${key}`));
      }
    }
    if (schema.additionalProperties === false) {
      for (const key of Object.keys(obj)) {
        if (!(key in properties)) {
          errors.push(`${path}: unexpected property '${key}'`);
        }
      }
    }
    return errors;
  }

  if (type === "array") {
    if (!Array.isArray(value)) {
      return [`${path}: expected array`];
    }
    if (typeof schema.minItems === "number" && value.length < schema.minItems) {
      errors.push(`${path}: fewer than ${schema.minItems} items`);
    }
    if (typeof schema.maxItems === "number" && value.length > schema.maxItems) {
      errors.push(`${path}: more than ${schema.maxItems} items`);
    }
    if (schema.uniqueItems === true) {
      const seen = new Set(value.map((v) => JSON.stringify(v)));
      if (seen.size !== value.length) {
        errors.push(`${path}: items not unique`);
      }
    }
    if (schema.items) {
      value.forEach((item, i) =>
        errors.push(...validateAgainstSchema(item, schema.items as Schema, `${path}[${i}]`)),
      );
    }
    return errors;
  }

  if (type === "string") {
    if (typeof value !== "string") errors.push(`${path}: expected string`);
    return errors;
  }

  if (type === "number") {
    if (typeof value !== "number") {
      return [`${path}: expected number`];
    }
    if (typeof schema.minimum === "number" && value < schema.minimum) {
      errors.push(`${path}: below minimum ${schema.minimum}`);
    }
    if (typeof schema.maximum === "number" && value > schema.maximum) {
      errors.push(`${path}: above maximum ${schema.maximum}`);
    }
    return errors;
  }

  if (schema.enum) {
    if (!(schema.enum as unknown[]).includes(value)) {
      errors.push(`${path}: not in enum`);
    }
  }
  return errors;
}
