/**
 * Token table loader. The table is the two-column (token, id) TSV
 * exported by `mazetrace vocab`; ids must be contiguous from 0.
 */
import fs from "node:fs";

export interface Vocab {
  tokens: string[];
  ids: Map<string, number>;
  bos: number;
  eos: number;
  pad: number;
  plan: number;
}

export function loadVocab(path: string): Vocab {
  const tokens: string[] = [];
  const lines = fs.readFileSync(path, "utf8").split("\n");
  for (const line of lines) {
    if (!line) continue;
    const [token, idText] = line.split("\t");
    const id = Number(idText);
    if (token === undefined || !Number.isInteger(id)) {
      throw new Error(`bad vocab line: ${JSON.stringify(line)}`);
    }
    if (id !== tokens.length) {
      throw new Error(`non-contiguous vocab id ${id} for ${token}`);
    }
    tokens.push(token);
  }
  const ids = new Map(tokens.map((t, i) => [t, i]));
  for (const required of ["bos", "eos", "pad", "plan"]) {
    if (!ids.has(required)) throw new Error(`vocab missing token ${required}`);
  }
  return {
    tokens,
    ids,
    bos: ids.get("bos")!,
    eos: ids.get("eos")!,
    pad: ids.get("pad")!,
    plan: ids.get("plan")!,
  };
}

export function encodeTokens(vocab: Vocab, text: string): number[] {
  if (!text) return [];
  return text.split(/\s+/).map((token) => {
    const id = vocab.ids.get(token);
    if (id === undefined) throw new Error(`token not in vocabulary: ${token}`);
    return id;
  });
}

export function decodeIds(vocab: Vocab, ids: ArrayLike<number>): string {
  const out: string[] = [];
  for (let i = 0; i < ids.length; i++) {
    const token = vocab.tokens[ids[i]];
    if (token === undefined) throw new Error(`id out of vocabulary: ${ids[i]}`);
    out.push(token);
  }
  return out.join(" ");
}
