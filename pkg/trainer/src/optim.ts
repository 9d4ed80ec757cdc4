/** AdamW with bias correction; weight decay applies only to tensors flagged decay. */
import { Tensor } from "./model.js";

export interface AdamWConfig {
  lr: number;
  beta1: number;
  beta2: number;
  eps: number;
  weightDecay: number;
}

export class AdamW {
  private m: Float64Array[];
  private v: Float64Array[];
  private step = 0;

  constructor(private tensors: Tensor[], private cfg: AdamWConfig) {
    this.m = tensors.map((t) => new Float64Array(t.data.length));
    this.v = tensors.map((t) => new Float64Array(t.data.length));
  }

  /** One update with the given learning rate (caller owns the schedule). */
  update(lr: number): void {
    this.step += 1;
    const { beta1, beta2, eps, weightDecay } = this.cfg;
    const bc1 = 1 - Math.pow(beta1, this.step);
    const bc2 = 1 - Math.pow(beta2, this.step);
    for (let i = 0; i < this.tensors.length; i++) {
      const t = this.tensors[i];
      const m = this.m[i];
      const v = this.v[i];
      const wd = t.decay ? weightDecay : 0;
      for (let j = 0; j < t.data.length; j++) {
        const g = t.grad[j];
        m[j] = beta1 * m[j] + (1 - beta1) * g;
        v[j] = beta2 * v[j] + (1 - beta2) * g * g;
        const mhat = m[j] / bc1;
        const vhat = v[j] / bc2;
        t.data[j] -= lr * (mhat / (Math.sqrt(vhat) + eps) + wd * t.data[j]);
      }
    }
  }
}

/** Scale all gradients so their global L2 norm is at most maxNorm. */
export function clipGradNorm(tensors: Tensor[], maxNorm: number): number {
  let sq = 0;
  for (const t of tensors) {
    for (let j = 0; j < t.grad.length; j++) sq += t.grad[j] * t.grad[j];
  }
  const norm = Math.sqrt(sq);
  if (norm > maxNorm && norm > 0) {
    const scale = maxNorm / norm;
    for (const t of tensors) {
      for (let j = 0; j < t.grad.length; j++) t.grad[j] *= scale;
    }
  }
  return norm;
}
