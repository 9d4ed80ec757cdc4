/**
 * Dataset loading: mazetrace shard files (JSON header line, then
 * problem\ttrace\tplan per line) and the manifest's holdout split.
 * Records are keyed by sha256 of the problem string, matching the ids
 * the analyzer expects in response files.
 */
import crypto from "node:crypto";
import fs from "node:fs";
import path from "node:path";

import { Vocab, encodeTokens } from "./vocab.js";

export interface MazeRecord {
  id: string;
  kind: string;
  problem: string;
  trace: string;
  plan: string;
}

export interface LoadedDataset {
  records: MazeRecord[];
  holdoutIds: Set<string>;
  width: number;
  height: number;
}

export function recordId(problem: string): string {
  return crypto.createHash("sha256").update(problem, "utf8").digest("hex");
}

export function readShard(shardPath: string): {
  records: MazeRecord[];
  width: number;
  height: number;
} {
  const text = fs.readFileSync(shardPath, "utf8");
  const lines = text.split("\n");
  // header seeds can exceed 2^53, so never rely on their parsed values
  const header = JSON.parse(lines[0]);
  if (header.format !== "mazetrace-shard-v1") {
    throw new Error(`${shardPath}: unknown shard format`);
  }
  const kinds: string[] = [];
  for (const [kind, count] of header.kinds as [string, number][]) {
    for (let i = 0; i < count; i++) kinds.push(kind);
  }
  const records: MazeRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    if (!lines[i]) continue;
    const parts = lines[i].split("\t");
    if (parts.length !== 3) {
      throw new Error(`${shardPath}:${i + 1}: expected 3 tab-separated fields`);
    }
    const [problem, trace, plan] = parts;
    records.push({
      id: recordId(problem),
      kind: kinds[records.length],
      problem,
      trace,
      plan,
    });
  }
  if (records.length !== header.records) {
    throw new Error(`${shardPath}: header claims ${header.records} records`);
  }
  return { records, width: header.width, height: header.height };
}

export function loadDataset(dir: string): LoadedDataset {
  const manifest = JSON.parse(
    fs.readFileSync(path.join(dir, "manifest.json"), "utf8"),
  );
  if (manifest.format !== "mazetrace-manifest-v1") {
    throw new Error(`${dir}: not a mazetrace dataset`);
  }
  const records: MazeRecord[] = [];
  let width = 0;
  let height = 0;
  for (const shard of manifest.shards) {
    const loaded = readShard(path.join(dir, shard.path));
    records.push(...loaded.records);
    width = loaded.width;
    height = loaded.height;
  }
  const holdoutIds = new Set<string>();
  if (manifest.split) {
    for (const ids of Object.values(manifest.split.holdout) as string[][]) {
      for (const id of ids) holdoutIds.add(id);
    }
  }
  return { records, holdoutIds, width, height };
}

/**
 * Token-id training sequences: bos ++ problem ++ trace ++ plan ++ eos.
 * Records longer than contextLength are skipped (counted for the log);
 * holdout records are excluded from training material.
 */
export function buildSequences(
  dataset: LoadedDataset,
  vocab: Vocab,
  contextLength: number,
): { sequences: Int32Array[]; skippedTooLong: number } {
  const sequences: Int32Array[] = [];
  let skippedTooLong = 0;
  for (const rec of dataset.records) {
    if (dataset.holdoutIds.has(rec.id)) continue;
    const ids = [
      vocab.bos,
      ...encodeTokens(vocab, rec.problem),
      ...encodeTokens(vocab, rec.trace),
      ...encodeTokens(vocab, rec.plan),
      vocab.eos,
    ];
    if (ids.length > contextLength) {
      skippedTooLong++;
      continue;
    }
    sequences.push(Int32Array.from(ids));
  }
  return { sequences, skippedTooLong };
}

export function holdoutRecords(dataset: LoadedDataset): MazeRecord[] {
  return dataset.records.filter((r) => dataset.holdoutIds.has(r.id));
}
