import path from "node:path";
import { describe, expect, it } from "vitest";

import { buildSequences, holdoutRecords, loadDataset, readShard } from "../src/data.js";
import { loadVocab } from "../src/vocab.js";

const FIXTURES = path.join(__dirname, "fixtures");
const DS = path.join(FIXTURES, "ds8");

describe("shard and dataset loading", () => {
  it("reads the shard with kinds and content ids", () => {
    const { records, width, height } = readShard(path.join(DS, "shard-00000.tsv"));
    expect(records.length).toBe(48);
    expect(width).toBe(8);
    expect(height).toBe(8);
    expect(new Set(records.map((r) => r.kind))).toEqual(
      new Set(["wilson", "freespace", "drunkard"]),
    );
    for (const rec of records) {
      expect(rec.id).toMatch(/^[0-9a-f]{64}$/);
      expect(rec.problem.startsWith("start ")).toBe(true);
      expect(rec.trace.split(/\s+/).length % 5).toBe(0);
      expect(rec.plan.split(/\s+/).length % 3).toBe(0);
    }
  });

  it("loads the manifest holdout split", () => {
    const dataset = loadDataset(DS);
    expect(dataset.records.length).toBe(48);
    expect(dataset.holdoutIds.size).toBe(12);
    expect(holdoutRecords(dataset).length).toBe(12);
  });

  it("builds bos/eos-delimited training sequences without holdout rows", () => {
    const dataset = loadDataset(DS);
    const vocab = loadVocab(path.join(FIXTURES, "vocab8.tsv"));
    const { sequences, skippedTooLong } = buildSequences(dataset, vocab, 512);
    expect(sequences.length + skippedTooLong).toBe(36); // 48 - 12 holdout
    for (const seq of sequences) {
      expect(seq[0]).toBe(vocab.bos);
      expect(seq[seq.length - 1]).toBe(vocab.eos);
      expect(seq.length).toBeLessThanOrEqual(512);
    }
  });

  it("skips sequences that exceed the context", () => {
    const dataset = loadDataset(DS);
    const vocab = loadVocab(path.join(FIXTURES, "vocab8.tsv"));
    const all = buildSequences(dataset, vocab, 4096);
    const tight = buildSequences(dataset, vocab, 150);
    expect(all.skippedTooLong).toBe(0);
    expect(tight.skippedTooLong).toBeGreaterThan(0);
    expect(tight.sequences.length).toBeLessThan(all.sequences.length);
  });
});
