/**
 * Entry point: `node dist/cli.js train config.json` trains and writes
 * outDir/{checkpoint,loss_log.csv,summary.json}; `node dist/cli.js
 * sample config.json` greedy-decodes the dataset's holdout records
 * into the configured responses file.
 */
import path from "node:path";

import { loadCheckpoint } from "./checkpoint.js";
import { holdoutRecords, loadDataset } from "./data.js";
import { writeResponses } from "./sample.js";
import { loadConfig, train } from "./train.js";
import { loadVocab } from "./vocab.js";

function usage(): never {
  process.stderr.write("usage: cli.js {train|sample} config.json\n");
  process.exit(2);
}

function main(argv: string[]): number {
  if (argv.length !== 2) usage();
  const [command, configPath] = argv;
  const cfg = loadConfig(configPath);
  if (command === "train") {
    train(cfg);
    return 0;
  }
  if (command === "sample") {
    const { model } = loadCheckpoint(path.join(cfg.outDir, "checkpoint"));
    const vocab = loadVocab(cfg.vocabPath);
    const dataset = loadDataset(cfg.datasetDir);
    const holdout = holdoutRecords(dataset);
    if (holdout.length === 0) {
      throw new Error("dataset has no holdout split; run `mazetrace split`");
    }
    const out = path.isAbsolute(cfg.responsesPath)
      ? cfg.responsesPath
      : path.join(cfg.outDir, cfg.responsesPath);
    writeResponses(out, model, vocab, holdout,
                   { maxNewTokens: cfg.maxNewTokens });
    process.stderr.write(`wrote ${holdout.length} responses to ${out}\n`);
    return 0;
  }
  usage();
}

process.exit(main(process.argv.slice(2)));
