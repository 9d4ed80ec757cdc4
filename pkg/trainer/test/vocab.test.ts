import path from "node:path";
import { describe, expect, it } from "vitest";

import { decodeIds, encodeTokens, loadVocab } from "../src/vocab.js";

const VOCAB_PATH = path.join(__dirname, "fixtures", "vocab8.tsv");

describe("vocab", () => {
  it("loads the exported table", () => {
    const vocab = loadVocab(VOCAB_PATH);
    expect(vocab.tokens.length).toBe(82); // 9 + 8 + 65 for an 8x8 grid
    expect(vocab.tokens[0]).toBe("start");
    expect(vocab.ids.get("c0")).toBe(17);
    expect(vocab.tokens[vocab.plan]).toBe("plan");
    expect(vocab.tokens[vocab.bos]).toBe("bos");
  });

  it("round-trips token text", () => {
    const vocab = loadVocab(VOCAB_PATH);
    const text = "close 1 1 c0 c4 plan 1 1";
    expect(decodeIds(vocab, encodeTokens(vocab, text))).toBe(text);
  });

  it("rejects unknown tokens and ids", () => {
    const vocab = loadVocab(VOCAB_PATH);
    expect(() => encodeTokens(vocab, "close 1 banana")).toThrow(/vocabulary/);
    expect(() => decodeIds(vocab, [999])).toThrow(/vocabulary/);
  });

  it("encodes empty text to no ids", () => {
    const vocab = loadVocab(VOCAB_PATH);
    expect(encodeTokens(vocab, "")).toEqual([]);
  });
});
