/**
 * Greedy decoding over holdout problems. Each prompt is bos ++ problem;
 * generation stops at eos/pad, at the context limit, or right after a
 * completed plan triple when the next token leaves the plan grammar.
 * Output lines are `id<TAB>generated tokens`, the analyzer's responses
 * file format.
 */
import fs from "node:fs";

import { MazeRecord } from "./data.js";
import { Gpt, argmax } from "./model.js";
import { Vocab, decodeIds, encodeTokens } from "./vocab.js";

export interface SampleOptions {
  maxNewTokens: number | null;
}

export function sampleResponse(
  model: Gpt, vocab: Vocab, record: MazeRecord,
  options: SampleOptions = { maxNewTokens: null },
): string {
  const prompt = [vocab.bos, ...encodeTokens(vocab, record.problem)];
  const tMax = model.cfg.contextLength;
  if (prompt.length >= tMax) return ""; // problem alone overflows the context
  const budget = Math.min(
    tMax - prompt.length,
    options.maxNewTokens ?? Infinity,
  );
  const session = model.startDecode();
  let logits = model.decodeStep(session, prompt[0]);
  for (let i = 1; i < prompt.length; i++) {
    logits = model.decodeStep(session, prompt[i]);
  }
  const generated: number[] = [];
  let inPlan = false;
  let tripleOffset = 0;
  while (generated.length < budget) {
    const next = argmax(logits, vocab.tokens.length);
    if (next === vocab.eos || next === vocab.pad) break;
    if (inPlan && tripleOffset === 0 && next !== vocab.plan) break;
    generated.push(next);
    if (next === vocab.plan && !inPlan) {
      inPlan = true;
      tripleOffset = 1;
    } else if (inPlan) {
      tripleOffset = (tripleOffset + 1) % 3;
    }
    if (session.pos >= tMax) break;
    logits = model.decodeStep(session, next);
  }
  return decodeIds(vocab, generated);
}

export function writeResponses(
  path: string, model: Gpt, vocab: Vocab, records: MazeRecord[],
  options: SampleOptions = { maxNewTokens: null },
  log: (line: string) => void = (line) => process.stderr.write(line + "\n"),
): void {
  const seen = new Set<string>();
  const lines: string[] = [];
  const started = Date.now();
  let failures = 0;
  for (let i = 0; i < records.length; i++) {
    const rec = records[i];
    if (seen.has(rec.id)) {
      throw new Error(`duplicate record id in sampling set: ${rec.id}`);
    }
    seen.add(rec.id);
    let text = "";
    try {
      text = sampleResponse(model, vocab, rec, options);
    } catch (err) {
      failures++; // decode failure becomes an empty response, not a crash
      log(`decode failed for ${rec.id}: ${err}`);
    }
    lines.push(`${rec.id}\t${text}`);
    if ((i + 1) % 10 === 0 || i + 1 === records.length) {
      const rate = ((i + 1) / ((Date.now() - started) / 1000)).toFixed(2);
      log(`sampled ${i + 1}/${records.length} (${rate} problems/s)`);
    }
  }
  if (failures > 0) log(`${failures} responses empty after decode failures`);
  fs.writeFileSync(path, lines.join("\n") + "\n");
}
