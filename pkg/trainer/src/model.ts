/**
 * Decoder-only transformer with hand-written forward and backward
 * passes over flat Float64Arrays. Pre-LN blocks:
 *
 *   h = x + Wo * attention(LN1(x))        (causal, multi-head)
 *   y = h + W2 * gelu(W1 * LN2(h))
 *
 * then a final LayerNorm and an untied linear head. forwardBackward
 * consumes one sequence at a time (no padding); batching is the
 * caller's loop, which accumulates gradients before the optimizer
 * step. A KV-cache path serves greedy decoding.
 */
import { Rng } from "./rng.js";

export interface ModelConfig {
  vocabSize: number;
  contextLength: number;
  dim: number;
  nLayers: number;
  nHeads: number;
}

export interface Tensor {
  name: string;
  rows: number;
  cols: number;
  data: Float64Array;
  grad: Float64Array;
  decay: boolean; // whether weight decay applies
}

function tensor(name: string, rows: number, cols: number, decay: boolean): Tensor {
  return {
    name,
    rows,
    cols,
    data: new Float64Array(rows * cols),
    grad: new Float64Array(rows * cols),
    decay,
  };
}

const GELU_C = Math.sqrt(2 / Math.PI);

function gelu(x: number): number {
  return 0.5 * x * (1 + Math.tanh(GELU_C * (x + 0.044715 * x * x * x)));
}

function geluGrad(x: number): number {
  const u = GELU_C * (x + 0.044715 * x * x * x);
  const t = Math.tanh(u);
  return 0.5 * (1 + t) + 0.5 * x * (1 - t * t) * GELU_C * (1 + 3 * 0.044715 * x * x);
}

/** out[M*N] = A[M*K] x B[K*N] */
function matmul(
  out: Float64Array, a: Float64Array, b: Float64Array,
  m: number, k: number, n: number,
): void {
  out.fill(0, 0, m * n);
  for (let i = 0; i < m; i++) {
    const ai = i * k;
    const oi = i * n;
    for (let p = 0; p < k; p++) {
      const av = a[ai + p];
      if (av === 0) continue;
      const bp = p * n;
      for (let j = 0; j < n; j++) out[oi + j] += av * b[bp + j];
    }
  }
}

/** dA[M*K] += dOut[M*N] x B[K*N]^T */
function matmulGradA(
  dA: Float64Array, dOut: Float64Array, b: Float64Array,
  m: number, k: number, n: number,
): void {
  for (let i = 0; i < m; i++) {
    const oi = i * n;
    const ai = i * k;
    for (let p = 0; p < k; p++) {
      const bp = p * n;
      let acc = 0;
      for (let j = 0; j < n; j++) acc += dOut[oi + j] * b[bp + j];
      dA[ai + p] += acc;
    }
  }
}

/** dB[K*N] += A[M*K]^T x dOut[M*N] */
function matmulGradB(
  dB: Float64Array, a: Float64Array, dOut: Float64Array,
  m: number, k: number, n: number,
): void {
  for (let i = 0; i < m; i++) {
    const ai = i * k;
    const oi = i * n;
    for (let p = 0; p < k; p++) {
      const av = a[ai + p];
      if (av === 0) continue;
      const bp = p * n;
      for (let j = 0; j < n; j++) dB[bp + j] += av * dOut[oi + j];
    }
  }
}

interface LayerParams {
  ln1g: Tensor; ln1b: Tensor;
  wqkv: Tensor; bqkv: Tensor;
  wo: Tensor; bo: Tensor;
  ln2g: Tensor; ln2b: Tensor;
  w1: Tensor; b1: Tensor;
  w2: Tensor; b2: Tensor;
}

interface LayerActs {
  xIn: Float64Array;    // T x D, block input
  xhat1: Float64Array;  // T x D
  inv1: Float64Array;   // T
  a1: Float64Array;     // T x D, LN1 output
  qkv: Float64Array;    // T x 3D
  probs: Float64Array;  // H x T x T attention weights
  concat: Float64Array; // T x D, heads concatenated
  h: Float64Array;      // T x D, after attention residual
  xhat2: Float64Array;  // T x D
  inv2: Float64Array;   // T
  a2: Float64Array;     // T x D, LN2 output
  m1: Float64Array;     // T x F pre-gelu
  mg: Float64Array;     // T x F post-gelu
}

export interface DecodeSession {
  pos: number;
  keys: Float64Array[];   // per layer, Tmax x D
  values: Float64Array[]; // per layer, Tmax x D
}

export class Gpt {
  readonly cfg: ModelConfig;
  readonly tensors: Tensor[] = [];
  readonly tokEmb: Tensor;
  readonly posEmb: Tensor;
  readonly layers: LayerParams[] = [];
  readonly lnfg: Tensor;
  readonly lnfb: Tensor;
  readonly head: Tensor;
  readonly bhead: Tensor;

  private acts: LayerActs[] = [];
  private xFinal: Float64Array;   // T x D after last block
  private xhatF: Float64Array;    // T x D
  private invF: Float64Array;     // T
  private aF: Float64Array;       // T x D LNf output
  private probsBuf: Float64Array; // T x V softmax probabilities
  private scratch: Float64Array[];
  private dpRow: Float64Array;    // T, attention-softmax backward temp
  private decVec: Float64Array[]; // decode temporaries

  constructor(cfg: ModelConfig) {
    if (cfg.dim % cfg.nHeads !== 0) {
      throw new Error("dim must be divisible by nHeads");
    }
    this.cfg = cfg;
    const { vocabSize: v, contextLength: t, dim: d, nLayers } = cfg;
    const f = 4 * d;
    const reg = (tn: Tensor) => {
      this.tensors.push(tn);
      return tn;
    };
    this.tokEmb = reg(tensor("tokEmb", v, d, false));
    this.posEmb = reg(tensor("posEmb", t, d, false));
    for (let l = 0; l < nLayers; l++) {
      this.layers.push({
        ln1g: reg(tensor(`l${l}.ln1g`, 1, d, false)),
        ln1b: reg(tensor(`l${l}.ln1b`, 1, d, false)),
        wqkv: reg(tensor(`l${l}.wqkv`, d, 3 * d, true)),
        bqkv: reg(tensor(`l${l}.bqkv`, 1, 3 * d, false)),
        wo: reg(tensor(`l${l}.wo`, d, d, true)),
        bo: reg(tensor(`l${l}.bo`, 1, d, false)),
        ln2g: reg(tensor(`l${l}.ln2g`, 1, d, false)),
        ln2b: reg(tensor(`l${l}.ln2b`, 1, d, false)),
        w1: reg(tensor(`l${l}.w1`, d, f, true)),
        b1: reg(tensor(`l${l}.b1`, 1, f, false)),
        w2: reg(tensor(`l${l}.w2`, f, d, true)),
        b2: reg(tensor(`l${l}.b2`, 1, d, false)),
      });
      this.acts.push({
        xIn: new Float64Array(t * d),
        xhat1: new Float64Array(t * d),
        inv1: new Float64Array(t),
        a1: new Float64Array(t * d),
        qkv: new Float64Array(t * 3 * d),
        probs: new Float64Array(cfg.nHeads * t * t),
        concat: new Float64Array(t * d),
        h: new Float64Array(t * d),
        xhat2: new Float64Array(t * d),
        inv2: new Float64Array(t),
        a2: new Float64Array(t * d),
        m1: new Float64Array(t * f),
        mg: new Float64Array(t * f),
      });
    }
    this.lnfg = reg(tensor("lnfg", 1, d, false));
    this.lnfb = reg(tensor("lnfb", 1, d, false));
    this.head = reg(tensor("head", d, v, true));
    this.bhead = reg(tensor("bhead", 1, v, false));

    this.xFinal = new Float64Array(t * d);
    this.xhatF = new Float64Array(t * d);
    this.invF = new Float64Array(t);
    this.aF = new Float64Array(t * d);
    this.probsBuf = new Float64Array(t * v);
    this.scratch = [
      new Float64Array(t * d), new Float64Array(t * d),
      new Float64Array(t * d), new Float64Array(t * 3 * d),
      new Float64Array(t * f), new Float64Array(t * f),
    ];
    this.dpRow = new Float64Array(t);
    this.decVec = [
      new Float64Array(d), new Float64Array(d), new Float64Array(3 * d),
      new Float64Array(d), new Float64Array(f), new Float64Array(v),
      new Float64Array(t),
    ];
  }

  init(rng: Rng): void {
    const residualScale = 1 / Math.sqrt(2 * this.cfg.nLayers);
    for (const t of this.tensors) {
      const isLnGain = /ln\w*g$/.test(t.name);
      const isLnShift = /ln\w*b$/.test(t.name);
      const isBias = /(^|\.)b\w*$/.test(t.name);
      if (isLnGain) {
        t.data.fill(1);
      } else if (isLnShift || isBias) {
        t.data.fill(0);
      } else {
        const scale =
          t.name.endsWith(".wo") || t.name.endsWith(".w2")
            ? 0.02 * residualScale
            : 0.02;
        for (let i = 0; i < t.data.length; i++) t.data[i] = rng.gauss() * scale;
      }
    }
  }

  paramCount(): number {
    return this.tensors.reduce((n, t) => n + t.data.length, 0);
  }

  zeroGrads(): void {
    for (const t of this.tensors) t.grad.fill(0);
  }

  private layerNorm(
    x: Float64Array, n: number, g: Float64Array, b: Float64Array,
    xhat: Float64Array, inv: Float64Array, out: Float64Array,
  ): void {
    const d = this.cfg.dim;
    for (let t = 0; t < n; t++) {
      const off = t * d;
      let mean = 0;
      for (let j = 0; j < d; j++) mean += x[off + j];
      mean /= d;
      let variance = 0;
      for (let j = 0; j < d; j++) {
        const c = x[off + j] - mean;
        variance += c * c;
      }
      variance /= d;
      const invStd = 1 / Math.sqrt(variance + 1e-5);
      inv[t] = invStd;
      for (let j = 0; j < d; j++) {
        const xh = (x[off + j] - mean) * invStd;
        xhat[off + j] = xh;
        out[off + j] = xh * g[j] + b[j];
      }
    }
  }

  /** dX += LN backward; also accumulates dG and dB. */
  private layerNormBackward(
    dOut: Float64Array, n: number, g: Float64Array,
    xhat: Float64Array, inv: Float64Array,
    dG: Float64Array, dB: Float64Array, dX: Float64Array,
  ): void {
    const d = this.cfg.dim;
    for (let t = 0; t < n; t++) {
      const off = t * d;
      let meanDxhat = 0;
      let meanDxhatXhat = 0;
      for (let j = 0; j < d; j++) {
        const dy = dOut[off + j];
        const xh = xhat[off + j];
        dG[j] += dy * xh;
        dB[j] += dy;
        const dxh = dy * g[j];
        meanDxhat += dxh;
        meanDxhatXhat += dxh * xh;
      }
      meanDxhat /= d;
      meanDxhatXhat /= d;
      const invStd = inv[t];
      for (let j = 0; j < d; j++) {
        const dxh = dOut[off + j] * g[j];
        dX[off + j] += invStd * (dxh - meanDxhat - xhat[off + j] * meanDxhatXhat);
      }
    }
  }

  /**
   * Forward + backward over one sequence; gradients are scaled by
   * gradScale and accumulated. Returns the summed cross-entropy over
   * the n-1 next-token predictions.
   */
  forwardBackward(ids: Int32Array, gradScale: number): number {
    const { dim: d, nHeads, vocabSize: v, contextLength: tMax } = this.cfg;
    const f = 4 * d;
    const n = ids.length;
    if (n < 2) throw new Error("sequence must have at least 2 tokens");
    if (n > tMax) throw new Error("sequence exceeds context length");
    const dh = d / nHeads;
    const scale = 1 / Math.sqrt(dh);

    // embeddings
    const x = this.scratch[0];
    for (let t = 0; t < n; t++) {
      const tok = ids[t] * d;
      const pos = t * d;
      for (let j = 0; j < d; j++) {
        x[t * d + j] = this.tokEmb.data[tok + j] + this.posEmb.data[pos + j];
      }
    }

    for (let l = 0; l < this.cfg.nLayers; l++) {
      const p = this.layers[l];
      const a = this.acts[l];
      a.xIn.set(x.subarray(0, n * d));
      this.layerNorm(a.xIn, n, p.ln1g.data, p.ln1b.data, a.xhat1, a.inv1, a.a1);
      matmul(a.qkv, a.a1, p.wqkv.data, n, d, 3 * d);
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < 3 * d; j++) a.qkv[t * 3 * d + j] += p.bqkv.data[j];
      }
      a.concat.fill(0, 0, n * d);
      for (let h = 0; h < nHeads; h++) {
        const qOff = h * dh;
        const kOff = d + h * dh;
        const vOff = 2 * d + h * dh;
        const probsH = a.probs.subarray(h * tMax * tMax);
        for (let t = 0; t < n; t++) {
          const rowOff = t * tMax;
          let maxScore = -Infinity;
          for (let u = 0; u <= t; u++) {
            let s = 0;
            for (let j = 0; j < dh; j++) {
              s += a.qkv[t * 3 * d + qOff + j] * a.qkv[u * 3 * d + kOff + j];
            }
            s *= scale;
            probsH[rowOff + u] = s;
            if (s > maxScore) maxScore = s;
          }
          let sum = 0;
          for (let u = 0; u <= t; u++) {
            const e = Math.exp(probsH[rowOff + u] - maxScore);
            probsH[rowOff + u] = e;
            sum += e;
          }
          const invSum = 1 / sum;
          for (let u = 0; u <= t; u++) probsH[rowOff + u] *= invSum;
          for (let j = 0; j < dh; j++) {
            let acc = 0;
            for (let u = 0; u <= t; u++) {
              acc += probsH[rowOff + u] * a.qkv[u * 3 * d + vOff + j];
            }
            a.concat[t * d + qOff + j] = acc;
          }
        }
      }
      matmul(a.h, a.concat, p.wo.data, n, d, d);
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < d; j++) {
          a.h[t * d + j] += a.xIn[t * d + j] + p.bo.data[j];
        }
      }
      this.layerNorm(a.h, n, p.ln2g.data, p.ln2b.data, a.xhat2, a.inv2, a.a2);
      matmul(a.m1, a.a2, p.w1.data, n, d, f);
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < f; j++) {
          const z = a.m1[t * f + j] + p.b1.data[j];
          a.m1[t * f + j] = z;
          a.mg[t * f + j] = gelu(z);
        }
      }
      matmul(x, a.mg, p.w2.data, n, f, d);
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < d; j++) {
          x[t * d + j] += a.h[t * d + j] + p.b2.data[j];
        }
      }
    }

    this.xFinal.set(x.subarray(0, n * d));
    this.layerNorm(this.xFinal, n, this.lnfg.data, this.lnfb.data,
                   this.xhatF, this.invF, this.aF);

    // logits, softmax, summed loss over targets ids[1..n-1]
    let lossSum = 0;
    const probs = this.probsBuf;
    const nPredict = n - 1;
    for (let t = 0; t < nPredict; t++) {
      const row = probs.subarray(t * v, (t + 1) * v);
      const aOff = t * d;
      let maxLogit = -Infinity;
      for (let j = 0; j < v; j++) {
        let acc = this.bhead.data[j];
        for (let k = 0; k < d; k++) {
          acc += this.aF[aOff + k] * this.head.data[k * v + j];
        }
        row[j] = acc;
        if (acc > maxLogit) maxLogit = acc;
      }
      let sum = 0;
      for (let j = 0; j < v; j++) {
        const e = Math.exp(row[j] - maxLogit);
        row[j] = e;
        sum += e;
      }
      const invSum = 1 / sum;
      for (let j = 0; j < v; j++) row[j] *= invSum;
      lossSum += -Math.log(row[ids[t + 1]] + 1e-30);
    }

    // ---- backward ----
    const dAF = this.scratch[1];
    dAF.fill(0, 0, n * d);
    for (let t = 0; t < nPredict; t++) {
      const row = probs.subarray(t * v, (t + 1) * v);
      const target = ids[t + 1];
      const aOff = t * d;
      for (let j = 0; j < v; j++) {
        const dLogit = (row[j] - (j === target ? 1 : 0)) * gradScale;
        this.bhead.grad[j] += dLogit;
        for (let k = 0; k < d; k++) {
          this.head.grad[k * v + j] += this.aF[aOff + k] * dLogit;
          dAF[aOff + k] += this.head.data[k * v + j] * dLogit;
        }
      }
    }

    const dX = this.scratch[2];
    dX.fill(0, 0, n * d);
    this.layerNormBackward(dAF, n, this.lnfg.data, this.xhatF, this.invF,
                           this.lnfg.grad, this.lnfb.grad, dX);

    const dQkv = this.scratch[3];
    const dM1 = this.scratch[4];
    const dMg = this.scratch[5];
    for (let l = this.cfg.nLayers - 1; l >= 0; l--) {
      const p = this.layers[l];
      const a = this.acts[l];
      // MLP backward; dX holds the block-output gradient
      dMg.fill(0, 0, n * f);
      matmulGradA(dMg, dX, p.w2.data, n, f, d);
      matmulGradB(p.w2.grad, a.mg, dX, n, f, d);
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < d; j++) p.b2.grad[j] += dX[t * d + j];
      }
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < f; j++) {
          dM1[t * f + j] = dMg[t * f + j] * geluGrad(a.m1[t * f + j]);
        }
      }
      const dA2 = dMg; // slab reuse: dMg consumed above
      dA2.fill(0, 0, n * d);
      matmulGradA(dA2, dM1, p.w1.data, n, d, f);
      matmulGradB(p.w1.grad, a.a2, dM1, n, d, f);
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < f; j++) p.b1.grad[j] += dM1[t * f + j];
      }
      // dX += LN2 backward -> dX becomes the attention-residual gradient
      this.layerNormBackward(dA2, n, p.ln2g.data, a.xhat2, a.inv2,
                             p.ln2g.grad, p.ln2b.grad, dX);
      // attention output projection
      const dConcat = dAF; // slab reuse: dAF consumed above
      dConcat.fill(0, 0, n * d);
      matmulGradA(dConcat, dX, p.wo.data, n, d, d);
      matmulGradB(p.wo.grad, a.concat, dX, n, d, d);
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < d; j++) p.bo.grad[j] += dX[t * d + j];
      }
      dQkv.fill(0, 0, n * 3 * d);
      const dh = d / nHeads;
      const scaleH = 1 / Math.sqrt(dh);
      const tMaxL = this.cfg.contextLength;
      const dp = this.dpRow;
      for (let h = 0; h < nHeads; h++) {
        const qOff = h * dh;
        const kOff = d + h * dh;
        const vOff = 2 * d + h * dh;
        const probsH = a.probs.subarray(h * tMaxL * tMaxL);
        for (let t = 0; t < n; t++) {
          const rowOff = t * tMaxL;
          let dot = 0;
          for (let u = 0; u <= t; u++) {
            let dpu = 0;
            for (let j = 0; j < dh; j++) {
              dpu += dConcat[t * d + qOff + j] * a.qkv[u * 3 * d + vOff + j];
            }
            dp[u] = dpu;
            dot += probsH[rowOff + u] * dpu;
            for (let j = 0; j < dh; j++) {
              dQkv[u * 3 * d + vOff + j] +=
                probsH[rowOff + u] * dConcat[t * d + qOff + j];
            }
          }
          for (let u = 0; u <= t; u++) {
            const ds = probsH[rowOff + u] * (dp[u] - dot) * scaleH;
            for (let j = 0; j < dh; j++) {
              dQkv[t * 3 * d + qOff + j] += ds * a.qkv[u * 3 * d + kOff + j];
              dQkv[u * 3 * d + kOff + j] += ds * a.qkv[t * 3 * d + qOff + j];
            }
          }
        }
      }
      const dA1 = dConcat; // slab reuse: dConcat consumed above
      dA1.fill(0, 0, n * d);
      matmulGradA(dA1, dQkv, p.wqkv.data, n, d, 3 * d);
      matmulGradB(p.wqkv.grad, a.a1, dQkv, n, d, 3 * d);
      for (let t = 0; t < n; t++) {
        for (let j = 0; j < 3 * d; j++) p.bqkv.grad[j] += dQkv[t * 3 * d + j];
      }
      // dX += LN1 backward -> gradient at the block input
      this.layerNormBackward(dA1, n, p.ln1g.data, a.xhat1, a.inv1,
                             p.ln1g.grad, p.ln1b.grad, dX);
    }

    for (let t = 0; t < n; t++) {
      const tok = ids[t] * d;
      const pos = t * d;
      for (let j = 0; j < d; j++) {
        this.tokEmb.grad[tok + j] += dX[t * d + j];
        this.posEmb.grad[pos + j] += dX[t * d + j];
      }
    }
    return lossSum;
  }

  startDecode(): DecodeSession {
    const { contextLength: t, dim: d, nLayers } = this.cfg;
    return {
      pos: 0,
      keys: Array.from({ length: nLayers }, () => new Float64Array(t * d)),
      values: Array.from({ length: nLayers }, () => new Float64Array(t * d)),
    };
  }

  private lnVec(
    x: Float64Array, g: Float64Array, b: Float64Array, out: Float64Array,
  ): void {
    const d = this.cfg.dim;
    let mean = 0;
    for (let j = 0; j < d; j++) mean += x[j];
    mean /= d;
    let variance = 0;
    for (let j = 0; j < d; j++) {
      const c = x[j] - mean;
      variance += c * c;
    }
    const invStd = 1 / Math.sqrt(variance / d + 1e-5);
    for (let j = 0; j < d; j++) out[j] = (x[j] - mean) * invStd * g[j] + b[j];
  }

  /**
   * Feed one token at the session's current position; returns the
   * logits for the next token (buffer reused between calls).
   */
  decodeStep(session: DecodeSession, tokenId: number): Float64Array {
    const { dim: d, nHeads, vocabSize: v, contextLength: tMax } = this.cfg;
    const f = 4 * d;
    const pos = session.pos;
    if (pos >= tMax) throw new Error("decode past context length");
    const dh = d / nHeads;
    const scale = 1 / Math.sqrt(dh);
    const [x, a1, qkv, concat, mlp, logits, att] = this.decVec;

    for (let j = 0; j < d; j++) {
      x[j] = this.tokEmb.data[tokenId * d + j] + this.posEmb.data[pos * d + j];
    }
    for (let l = 0; l < this.cfg.nLayers; l++) {
      const p = this.layers[l];
      this.lnVec(x, p.ln1g.data, p.ln1b.data, a1);
      for (let j = 0; j < 3 * d; j++) {
        let acc = p.bqkv.data[j];
        for (let k = 0; k < d; k++) acc += a1[k] * p.wqkv.data[k * 3 * d + j];
        qkv[j] = acc;
      }
      const keys = session.keys[l];
      const values = session.values[l];
      for (let j = 0; j < d; j++) {
        keys[pos * d + j] = qkv[d + j];
        values[pos * d + j] = qkv[2 * d + j];
      }
      for (let h = 0; h < nHeads; h++) {
        const qOff = h * dh;
        let maxScore = -Infinity;
        for (let u = 0; u <= pos; u++) {
          let s = 0;
          for (let j = 0; j < dh; j++) {
            s += qkv[qOff + j] * keys[u * d + qOff + j];
          }
          s *= scale;
          att[u] = s;
          if (s > maxScore) maxScore = s;
        }
        let sum = 0;
        for (let u = 0; u <= pos; u++) {
          const e = Math.exp(att[u] - maxScore);
          att[u] = e;
          sum += e;
        }
        const invSum = 1 / sum;
        for (let j = 0; j < dh; j++) {
          let acc = 0;
          for (let u = 0; u <= pos; u++) {
            acc += att[u] * invSum * values[u * d + qOff + j];
          }
          concat[qOff + j] = acc;
        }
      }
      for (let j = 0; j < d; j++) {
        let acc = p.bo.data[j];
        for (let k = 0; k < d; k++) acc += concat[k] * p.wo.data[k * d + j];
        x[j] += acc;
      }
      this.lnVec(x, p.ln2g.data, p.ln2b.data, a1);
      for (let j = 0; j < f; j++) {
        let acc = p.b1.data[j];
        for (let k = 0; k < d; k++) acc += a1[k] * p.w1.data[k * f + j];
        mlp[j] = gelu(acc);
      }
      for (let j = 0; j < d; j++) {
        let acc = p.b2.data[j];
        for (let k = 0; k < f; k++) acc += mlp[k] * p.w2.data[k * d + j];
        x[j] += acc;
      }
    }
    this.lnVec(x, this.lnfg.data, this.lnfb.data, a1);
    for (let j = 0; j < v; j++) {
      let acc = this.bhead.data[j];
      for (let k = 0; k < d; k++) acc += a1[k] * this.head.data[k * v + j];
      logits[j] = acc;
    }
    session.pos += 1;
    return logits;
  }
}

export function argmax(values: Float64Array, n: number): number {
  let best = 0;
  for (let j = 1; j < n; j++) {
    if (values[j] > values[best]) best = j;
  }
  return best;
}
