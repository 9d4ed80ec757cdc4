/**
 * Checkpoint layout: model.json carries the model config, step, and the
 * ordered tensor specs; weights.bin is the little-endian Float64
 * concatenation of the tensors in that order.
 */
import fs from "node:fs";
import path from "node:path";

import { Gpt, ModelConfig } from "./model.js";

export function saveCheckpoint(dir: string, model: Gpt, step: number): void {
  fs.mkdirSync(dir, { recursive: true });
  const meta = {
    format: "mazetrace-trainer-checkpoint-v1",
    step,
    config: model.cfg,
    tensors: model.tensors.map((t) => ({
      name: t.name,
      rows: t.rows,
      cols: t.cols,
    })),
  };
  let total = 0;
  for (const t of model.tensors) total += t.data.length;
  const weights = new Float64Array(total);
  let offset = 0;
  for (const t of model.tensors) {
    weights.set(t.data, offset);
    offset += t.data.length;
  }
  fs.writeFileSync(path.join(dir, "model.json"), JSON.stringify(meta, null, 2));
  fs.writeFileSync(path.join(dir, "weights.bin"), Buffer.from(weights.buffer));
}

export function loadCheckpoint(dir: string): { model: Gpt; step: number } {
  const meta = JSON.parse(
    fs.readFileSync(path.join(dir, "model.json"), "utf8"),
  );
  if (meta.format !== "mazetrace-trainer-checkpoint-v1") {
    throw new Error(`${dir}: unknown checkpoint format`);
  }
  const model = new Gpt(meta.config as ModelConfig);
  const raw = fs.readFileSync(path.join(dir, "weights.bin"));
  const weights = new Float64Array(
    raw.buffer, raw.byteOffset, raw.byteLength / 8,
  );
  let offset = 0;
  for (let i = 0; i < model.tensors.length; i++) {
    const t = model.tensors[i];
    const spec = meta.tensors[i];
    if (spec.name !== t.name || spec.rows * spec.cols !== t.data.length) {
      throw new Error(`checkpoint tensor mismatch at ${t.name}`);
    }
    t.data.set(weights.subarray(offset, offset + t.data.length));
    offset += t.data.length;
  }
  if (offset !== weights.length) {
    throw new Error("checkpoint weight count mismatch");
  }
  return { model, step: meta.step };
}
