/**
 * Training loop: next-token objective over bos ++ problem ++ trace ++
 * plan ++ eos sequences drawn from a mazetrace dataset (holdout rows
 * excluded). Runs are deterministic for a fixed config and seed.
 *
 * Outputs under outDir: checkpoint/ (model.json + weights.bin),
 * loss_log.csv (step,loss,lr), and summary.json with the smoothed
 * initial/final losses used by the loss-reduction gate.
 */
import fs from "node:fs";
import path from "node:path";

import { buildSequences, loadDataset } from "./data.js";
import { Gpt } from "./model.js";
import { AdamW, clipGradNorm } from "./optim.js";
import { Rng } from "./rng.js";
import { loadVocab } from "./vocab.js";
import { saveCheckpoint } from "./checkpoint.js";

export interface TrainerConfig {
  datasetDir: string;
  vocabPath: string;
  outDir: string;
  steps: number;
  batchSize: number;
  contextLength: number;
  dim: number;
  nLayers: number;
  nHeads: number;
  seed: number;
  lr: number;
  warmupSteps: number;
  weightDecay: number;
  gradClip: number;
  logEvery: number;
  checkpointEvery: number;
  smoothWindow: number;
  // sampling settings (used by the sample command)
  responsesPath: string;
  maxNewTokens: number | null;
}

export const DEFAULT_CONFIG: Omit<TrainerConfig, "datasetDir" | "vocabPath" | "outDir"> = {
  steps: 5000,
  batchSize: 4,
  contextLength: 512,
  dim: 64,
  nLayers: 2,
  nHeads: 2,
  seed: 1337,
  lr: 1e-3,
  warmupSteps: 100,
  weightDecay: 0.01,
  gradClip: 1.0,
  logEvery: 25,
  checkpointEvery: 1000,
  smoothWindow: 50,
  responsesPath: "responses.txt",
  maxNewTokens: null,
};

export function loadConfig(configPath: string): TrainerConfig {
  const raw = JSON.parse(fs.readFileSync(configPath, "utf8"));
  for (const key of ["datasetDir", "vocabPath", "outDir"]) {
    if (typeof raw[key] !== "string") {
      throw new Error(`config missing required string field ${key}`);
    }
  }
  const cfg = { ...DEFAULT_CONFIG, ...raw } as TrainerConfig;
  const base = path.dirname(path.resolve(configPath));
  const abs = (p: string) =>
    path.isAbsolute(p) ? p : path.join(base, p);
  cfg.datasetDir = abs(cfg.datasetDir);
  cfg.vocabPath = abs(cfg.vocabPath);
  cfg.outDir = abs(cfg.outDir);
  return cfg;
}

export interface TrainResult {
  model: Gpt;
  losses: number[];
  smoothedInitial: number;
  smoothedFinal: number;
  reduction: number;
}

function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

export function train(
  cfg: TrainerConfig,
  log: (line: string) => void = (line) => process.stderr.write(line + "\n"),
): TrainResult {
  const vocab = loadVocab(cfg.vocabPath);
  const dataset = loadDataset(cfg.datasetDir);
  const { sequences, skippedTooLong } = buildSequences(
    dataset, vocab, cfg.contextLength,
  );
  if (sequences.length === 0) throw new Error("no training sequences fit");
  log(`dataset: ${dataset.records.length} records, ` +
      `${dataset.holdoutIds.size} held out, ${sequences.length} training ` +
      `sequences (${skippedTooLong} skipped as too long)`);

  const model = new Gpt({
    vocabSize: vocab.tokens.length,
    contextLength: cfg.contextLength,
    dim: cfg.dim,
    nLayers: cfg.nLayers,
    nHeads: cfg.nHeads,
  });
  const rng = new Rng(cfg.seed);
  model.init(rng);
  log(`model: ${model.paramCount()} parameters`);

  const optim = new AdamW(model.tensors, {
    lr: cfg.lr, beta1: 0.9, beta2: 0.999, eps: 1e-8,
    weightDecay: cfg.weightDecay,
  });

  const lrAt = (step: number): number => {
    if (step < cfg.warmupSteps) return (cfg.lr * (step + 1)) / cfg.warmupSteps;
    const progress = (step - cfg.warmupSteps) /
      Math.max(1, cfg.steps - cfg.warmupSteps);
    return 0.1 * cfg.lr + 0.45 * cfg.lr * (1 + Math.cos(Math.PI * progress));
  };

  fs.mkdirSync(cfg.outDir, { recursive: true });
  const lossLines: string[] = ["step,loss,lr"];
  const losses: number[] = [];
  const started = Date.now();

  for (let step = 0; step < cfg.steps; step++) {
    const batch: Int32Array[] = [];
    let predicted = 0;
    for (let b = 0; b < cfg.batchSize; b++) {
      const seq = sequences[rng.int(sequences.length)];
      batch.push(seq);
      predicted += seq.length - 1;
    }
    model.zeroGrads();
    let lossSum = 0;
    for (const seq of batch) {
      lossSum += model.forwardBackward(seq, 1 / predicted);
    }
    const loss = lossSum / predicted;
    clipGradNorm(model.tensors, cfg.gradClip);
    const lr = lrAt(step);
    optim.update(lr);
    losses.push(loss);
    lossLines.push(`${step},${loss},${lr}`);
    if (step % cfg.logEvery === 0 || step === cfg.steps - 1) {
      const rate = ((step + 1) / ((Date.now() - started) / 1000)).toFixed(2);
      log(`step ${step}/${cfg.steps} loss ${loss.toFixed(4)} ` +
          `lr ${lr.toExponential(2)} (${rate} steps/s)`);
    }
    if ((step + 1) % cfg.checkpointEvery === 0 && step + 1 < cfg.steps) {
      saveCheckpoint(path.join(cfg.outDir, "checkpoint"), model, step + 1);
      fs.writeFileSync(path.join(cfg.outDir, "loss_log.csv"),
                       lossLines.join("\n") + "\n");
    }
  }

  const window = Math.min(cfg.smoothWindow, Math.ceil(losses.length / 2));
  const smoothedInitial = mean(losses.slice(0, window));
  const smoothedFinal = mean(losses.slice(-window));
  const reduction = 1 - smoothedFinal / smoothedInitial;

  saveCheckpoint(path.join(cfg.outDir, "checkpoint"), model, cfg.steps);
  fs.writeFileSync(path.join(cfg.outDir, "loss_log.csv"),
                   lossLines.join("\n") + "\n");
  fs.writeFileSync(path.join(cfg.outDir, "summary.json"), JSON.stringify({
    steps: cfg.steps,
    paramCount: model.paramCount(),
    smoothWindow: window,
    smoothedInitial,
    smoothedFinal,
    reduction,
  }, null, 2) + "\n");
  log(`smoothed loss ${smoothedInitial.toFixed(4)} -> ` +
      `${smoothedFinal.toFixed(4)} (${(reduction * 100).toFixed(1)}% reduction)`);
  return { model, losses, smoothedInitial, smoothedFinal, reduction };
}
