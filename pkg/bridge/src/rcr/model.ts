/**
 * Copy/replace rewriter: bidirectional recurrent encoder, attention decoder.
 *
 * Per decoding step the model outputs a distribution over L copy positions
 * and N replacement words, gated by a replacement probability:
 *
 *   e_i   = v . tanh(Wah h_i + Was s_t + battn)      (additive attention)
 *   a     = softmax(e over active positions)
 *   h*    = sum_i a_i h_i
 *   p_r   = sigmoid(wph.h* + wps.s_t + wpx.x_t)      (no bias)
 *   o_r   = softmax(Wr^T (Wrh h* + Wrs s_t + Wrx x_t))
 *   o_c   = softmax(Wc^T (Wch h* + Wcs s_t + Wcx x_t))   (PAD masked)
 *   final = concat((1 - p_r) o_c, p_r o_r)            -> sums to 1
 *
 * Training is teacher-forced cross-entropy on the final distribution; all
 * gradients are hand-derived and validated by the finite-difference test.
 */

import {
  Mat,
  Vec,
  addInto,
  addOuter,
  dot,
  mat,
  matTVec,
  matVec,
  randMat,
  randVec,
  sigmoid,
  softmaxMasked,
  tanhVec,
  zeros,
} from "../tensor.js";
import { Rng } from "../rng.js";

export const PAD = "<pad>";
export const BOS = "<bos>";

export interface RcrConfig {
  hs: number;
  maxLen: number; // L
  vocab: string[]; // includes PAD at 0 and BOS at 1
  replacements: string[]; // all must be vocabulary words
}

export interface Example {
  /** token ids padded with PAD to maxLen */
  tokens: number[];
  /** number of real tokens */
  length: number;
  /** actions: value < maxLen copies that position, else replaces with word (value - maxLen) */
  target: number[];
}

interface StepCache {
  x: Vec;
  prevWord: number;
  s: Vec;
  sPrev: Vec;
  att: { t: Vec; a: Vec };
  hstar: Vec;
  pr: number;
  zr: Vec;
  or: Vec;
  zc: Vec;
  oc: Vec;
}

export class RcrModel {
  cfg: RcrConfig;
  wordId: Map<string, number>;
  params: Record<string, Mat | Vec>;

  constructor(cfg: RcrConfig, seed = 1) {
    if (cfg.vocab[0] !== PAD || cfg.vocab[1] !== BOS) {
      throw new Error("vocab must start with PAD, BOS");
    }
    this.cfg = cfg;
    this.wordId = new Map(cfg.vocab.map((w, i) => [w, i]));
    for (const r of cfg.replacements) {
      if (!this.wordId.has(r)) throw new Error(`replacement ${r} missing from vocab`);
    }
    const { hs, maxLen, vocab, replacements } = cfg;
    const rng = new Rng(seed);
    const s = 0.25 / Math.sqrt(hs);
    this.params = {
      emb: randMat(vocab.length, hs, rng, s),
      Wf: randMat(hs, hs, rng, s),
      Uf: randMat(hs, hs, rng, s),
      bf: zeros(hs),
      Wb: randMat(hs, hs, rng, s),
      Ub: randMat(hs, hs, rng, s),
      bb: zeros(hs),
      Wdx: randMat(hs, hs, rng, s),
      Uds: randMat(hs, hs, rng, s),
      bd: zeros(hs),
      Wah: randMat(hs, hs, rng, s),
      Was: randMat(hs, hs, rng, s),
      battn: zeros(hs),
      v: randVec(hs, rng, s),
      wph: randVec(hs, rng, s),
      wps: randVec(hs, rng, s),
      wpx: randVec(hs, rng, s),
      Wrh: randMat(hs, hs, rng, s),
      Wrs: randMat(hs, hs, rng, s),
      Wrx: randMat(hs, hs, rng, s),
      Wr: randMat(hs, replacements.length, rng, s),
      Wch: randMat(hs, hs, rng, s),
      Wcs: randMat(hs, hs, rng, s),
      Wcx: randMat(hs, hs, rng, s),
      Wc: randMat(hs, maxLen, rng, s),
    };
  }

  get replacementCount(): number {
    return this.cfg.replacements.length;
  }

  private m(name: string): Mat {
    return this.params[name] as Mat;
  }

  private v(name: string): Vec {
    return this.params[name] as Vec;
  }

  /** Word emitted by an action index. */
  emittedWordId(action: number, tokens: number[]): number {
    if (action < this.cfg.maxLen) return tokens[action];
    return this.wordId.get(this.cfg.replacements[action - this.cfg.maxLen])!;
  }

  encode(tokens: number[], length: number): { h: Vec[]; hf: Vec[]; hb: Vec[] } {
    const { hs } = this.cfg;
    const emb = this.m("emb");
    const hf: Vec[] = [];
    const hb: Vec[] = [];
    let prev = zeros(hs);
    for (let i = 0; i < length; i++) {
      const pre = zeros(hs);
      matVec(this.m("Wf"), this.embOf(emb, tokens[i]), pre);
      const rec = zeros(hs);
      matVec(this.m("Uf"), prev, rec);
      addInto(pre, rec);
      addInto(pre, this.v("bf"));
      const h = tanhVec(pre, zeros(hs));
      hf.push(h);
      prev = h;
    }
    prev = zeros(hs);
    for (let i = length - 1; i >= 0; i--) {
      const pre = zeros(hs);
      matVec(this.m("Wb"), this.embOf(emb, tokens[i]), pre);
      const rec = zeros(hs);
      matVec(this.m("Ub"), prev, rec);
      addInto(pre, rec);
      addInto(pre, this.v("bb"));
      const h = tanhVec(pre, zeros(hs));
      hb[i] = h;
      prev = h;
    }
    const h: Vec[] = [];
    for (let i = 0; i < length; i++) {
      const sum = zeros(hs);
      addInto(sum, hf[i]);
      addInto(sum, hb[i]);
      h.push(sum);
    }
    return { h, hf, hb };
  }

  private embOf(emb: Mat, id: number): Vec {
    return emb.data.subarray(id * emb.cols, (id + 1) * emb.cols) as Vec;
  }

  /**
   * One decoder step. Returns the pieces of the final distribution; the
   * caller assembles final[j] = (1-pr)*oc[j] (j < L) and pr*or[j - L].
   */
  step(h: Vec[], active: number[], sPrev: Vec, prevWord: number): StepCache {
    const { hs, maxLen } = this.cfg;
    const x = this.embOf(this.m("emb"), prevWord);
    const pre = zeros(hs);
    matVec(this.m("Wdx"), x, pre);
    const rec = zeros(hs);
    matVec(this.m("Uds"), sPrev, rec);
    addInto(pre, rec);
    addInto(pre, this.v("bd"));
    const s = tanhVec(pre, zeros(hs));

    const tAll = zeros(hs * active.length);
    const e = zeros(maxLen);
    e.fill(-Infinity);
    const was = zeros(hs);
    matVec(this.m("Was"), s, was);
    for (let idx = 0; idx < active.length; idx++) {
      const i = active[idx];
      const ti = tAll.subarray(idx * hs, (idx + 1) * hs) as Vec;
      matVec(this.m("Wah"), h[i], ti);
      addInto(ti, was);
      addInto(ti, this.v("battn"));
      tanhVec(ti, ti);
      e[i] = dot(this.v("v"), ti);
    }
    const a = softmaxMasked(e, active, zeros(maxLen));
    const hstar = zeros(hs);
    for (const i of active) addInto(hstar, h[i], a[i]);

    const pr = sigmoid(dot(this.v("wph"), hstar) + dot(this.v("wps"), s) + dot(this.v("wpx"), x));

    const zr = zeros(hs);
    matVec(this.m("Wrh"), hstar, zr);
    const tmp = zeros(hs);
    matVec(this.m("Wrs"), s, tmp);
    addInto(zr, tmp);
    matVec(this.m("Wrx"), x, tmp);
    addInto(zr, tmp);
    const logitsR = zeros(this.replacementCount);
    matTVec(this.m("Wr"), zr, logitsR);
    const allR = [...Array(this.replacementCount).keys()];
    const or = softmaxMasked(logitsR, allR, zeros(this.replacementCount));

    const zc = zeros(hs);
    matVec(this.m("Wch"), hstar, zc);
    matVec(this.m("Wcs"), s, tmp);
    addInto(zc, tmp);
    matVec(this.m("Wcx"), x, tmp);
    addInto(zc, tmp);
    const logitsC = zeros(maxLen);
    matTVec(this.m("Wc"), zc, logitsC);
    const oc = softmaxMasked(logitsC, active, zeros(maxLen));

    return { x, prevWord, s, sPrev, att: { t: tAll, a }, hstar, pr, zr, or, zc, oc };
  }

  finalDistribution(cache: StepCache): Float64Array {
    const { maxLen } = this.cfg;
    const out = zeros(maxLen + this.replacementCount);
    for (let j = 0; j < maxLen; j++) out[j] = (1 - cache.pr) * cache.oc[j];
    for (let j = 0; j < this.replacementCount; j++) out[maxLen + j] = cache.pr * cache.or[j];
    return out;
  }

  loss(ex: Example): number {
    const { h } = this.encode(ex.tokens, ex.length);
    const active = [...Array(ex.length).keys()];
    let s = zeros(this.cfg.hs);
    let prevWord = this.wordId.get(BOS)!;
    let total = 0;
    for (const target of ex.target) {
      const cache = this.step(h, active, s, prevWord);
      const final = this.finalDistribution(cache);
      total += -Math.log(Math.max(final[target], 1e-300));
      s = cache.s;
      prevWord = this.emittedWordId(target, ex.tokens);
    }
    return total;
  }

  /** Teacher-forced loss and parameter gradients for one example. */
  lossAndGradients(ex: Example): { loss: number; grads: Record<string, Mat | Vec> } {
    const { hs, maxLen } = this.cfg;
    const N = this.replacementCount;
    const { h, hf, hb } = this.encode(ex.tokens, ex.length);
    const active = [...Array(ex.length).keys()];

    const caches: StepCache[] = [];
    let s = zeros(hs);
    let prevWord = this.wordId.get(BOS)!;
    let total = 0;
    for (const target of ex.target) {
      const cache = this.step(h, active, s, prevWord);
      const final = this.finalDistribution(cache);
      total += -Math.log(Math.max(final[target], 1e-300));
      caches.push(cache);
      s = cache.s;
      prevWord = this.emittedWordId(target, ex.tokens);
    }

    const grads: Record<string, Mat | Vec> = {};
    for (const [name, p] of Object.entries(this.params)) {
      grads[name] = (p as Mat).data !== undefined ? mat((p as Mat).rows, (p as Mat).cols) : zeros((p as Vec).length);
    }
    const gm = (n: string) => grads[n] as Mat;
    const gv = (n: string) => grads[n] as Vec;

    const dH: Vec[] = active.map(() => zeros(hs));
    let dSNext = zeros(hs); // gradient flowing into s_{t} from step t+1

    for (let t = ex.target.length - 1; t >= 0; t--) {
      const cache = caches[t];
      const target = ex.target[t];
      const dS = dSNext;
      const dHstar = zeros(hs);
      const dX = zeros(hs);

      // cross-entropy through the gated concat
      let dPr: number;
      const dLogitsR = zeros(N);
      const dLogitsC = zeros(maxLen);
      if (target < maxLen) {
        dPr = 1 / (1 - cache.pr);
        for (const i of active) dLogitsC[i] = cache.oc[i];
        dLogitsC[target] -= 1;
      } else {
        dPr = -1 / cache.pr;
        for (let j = 0; j < N; j++) dLogitsR[j] = cache.or[j];
        dLogitsR[target - maxLen] -= 1;
      }

      // copy head: logitsC = Wc^T zc, so dWc[:, i] += dLogitsC[i] * zc
      const dZc = zeros(hs);
      if (target < maxLen) {
        const wc = this.m("Wc");
        for (let r = 0; r < hs; r++) {
          const base = r * maxLen;
          let acc = 0;
          for (const i of active) {
            gm("Wc").data[base + i] += dLogitsC[i] * cache.zc[r];
            acc += wc.data[base + i] * dLogitsC[i];
          }
          dZc[r] = acc;
        }
        addOuter(gm("Wch"), dZc, cache.hstar);
        addOuter(gm("Wcs"), dZc, cache.s);
        addOuter(gm("Wcx"), dZc, cache.x);
        const tmp = zeros(hs);
        matTVec(this.m("Wch"), dZc, tmp);
        addInto(dHstar, tmp);
        matTVec(this.m("Wcs"), dZc, tmp);
        addInto(dS, tmp);
        matTVec(this.m("Wcx"), dZc, tmp);
        addInto(dX, tmp);
      }

      // replacement head
      if (target >= maxLen) {
        const dZr = zeros(hs);
        const wr = this.m("Wr");
        for (let r = 0; r < hs; r++) {
          const base = r * N;
          let acc = 0;
          for (let j = 0; j < N; j++) {
            gm("Wr").data[base + j] += dLogitsR[j] * cache.zr[r];
            acc += wr.data[base + j] * dLogitsR[j];
          }
          dZr[r] = acc;
        }
        addOuter(gm("Wrh"), dZr, cache.hstar);
        addOuter(gm("Wrs"), dZr, cache.s);
        addOuter(gm("Wrx"), dZr, cache.x);
        const tmp = zeros(hs);
        matTVec(this.m("Wrh"), dZr, tmp);
        addInto(dHstar, tmp);
        matTVec(this.m("Wrs"), dZr, tmp);
        addInto(dS, tmp);
        matTVec(this.m("Wrx"), dZr, tmp);
        addInto(dX, tmp);
      }

      // replacement gate
      const dPre = dPr * cache.pr * (1 - cache.pr);
      addInto(gv("wph"), cache.hstar, dPre);
      addInto(gv("wps"), cache.s, dPre);
      addInto(gv("wpx"), cache.x, dPre);
      addInto(dHstar, this.v("wph"), dPre);
      addInto(dS, this.v("wps"), dPre);
      addInto(dX, this.v("wpx"), dPre);

      // attention: hstar = sum a_i h_i
      const dA = zeros(maxLen);
      for (const i of active) {
        dA[i] = dot(dHstar, h[i]);
        addInto(dH[i], dHstar, cache.att.a[i]);
      }
      let aDot = 0;
      for (const i of active) aDot += cache.att.a[i] * dA[i];
      const dWasSum = zeros(hs);
      for (let idx = 0; idx < active.length; idx++) {
        const i = active[idx];
        const dE = cache.att.a[i] * (dA[i] - aDot);
        if (dE === 0) continue;
        const ti = cache.att.t.subarray(idx * hs, (idx + 1) * hs) as Vec;
        addInto(gv("v"), ti, dE);
        const dTi = zeros(hs);
        addInto(dTi, this.v("v"), dE);
        for (let r = 0; r < hs; r++) dTi[r] *= 1 - ti[r] * ti[r];
        addOuter(gm("Wah"), dTi, h[i]);
        const tmp = zeros(hs);
        matTVec(this.m("Wah"), dTi, tmp);
        addInto(dH[i], tmp);
        addInto(dWasSum, dTi);
        addInto(gv("battn"), dTi);
      }
      addOuter(gm("Was"), dWasSum, cache.s);
      const tmp2 = zeros(hs);
      matTVec(this.m("Was"), dWasSum, tmp2);
      addInto(dS, tmp2);

      // decoder recurrence s_t = tanh(Wdx x + Uds s_prev + bd)
      const dPreS = zeros(hs);
      for (let r = 0; r < hs; r++) dPreS[r] = dS[r] * (1 - cache.s[r] * cache.s[r]);
      addOuter(gm("Wdx"), dPreS, cache.x);
      addOuter(gm("Uds"), dPreS, cache.sPrev);
      addInto(gv("bd"), dPreS);
      const tmp3 = zeros(hs);
      matTVec(this.m("Wdx"), dPreS, tmp3);
      addInto(dX, tmp3);
      dSNext = zeros(hs);
      matTVec(this.m("Uds"), dPreS, dSNext);

      // decoder input embedding
      const embGrad = gm("emb");
      const base = cache.prevWord * hs;
      for (let r = 0; r < hs; r++) embGrad.data[base + r] += dX[r];
    }

    // encoder BPTT over both directions
    const dHf: Vec[] = active.map(() => zeros(hs));
    const dHb: Vec[] = active.map(() => zeros(hs));
    for (let i = 0; i < ex.length; i++) {
      addInto(dHf[i], dH[i]);
      addInto(dHb[i], dH[i]);
    }
    let carry = zeros(hs);
    for (let i = ex.length - 1; i >= 0; i--) {
      const dTotal = zeros(hs);
      addInto(dTotal, dHf[i]);
      addInto(dTotal, carry);
      const dPre = zeros(hs);
      for (let r = 0; r < hs; r++) dPre[r] = dTotal[r] * (1 - hf[i][r] * hf[i][r]);
      const x = this.embOf(this.m("emb"), ex.tokens[i]);
      addOuter(gm("Wf"), dPre, x);
      if (i > 0) addOuter(gm("Uf"), dPre, hf[i - 1]);
      addInto(gv("bf"), dPre);
      const dX = zeros(hs);
      matTVec(this.m("Wf"), dPre, dX);
      const base = ex.tokens[i] * hs;
      for (let r = 0; r < hs; r++) gm("emb").data[base + r] += dX[r];
      carry = zeros(hs);
      matTVec(this.m("Uf"), dPre, carry);
    }
    carry = zeros(hs);
    for (let i = 0; i < ex.length; i++) {
      const dTotal = zeros(hs);
      addInto(dTotal, dHb[i]);
      addInto(dTotal, carry);
      const dPre = zeros(hs);
      for (let r = 0; r < hs; r++) dPre[r] = dTotal[r] * (1 - hb[i][r] * hb[i][r]);
      const x = this.embOf(this.m("emb"), ex.tokens[i]);
      addOuter(gm("Wb"), dPre, x);
      if (i < ex.length - 1) addOuter(gm("Ub"), dPre, hb[i + 1]);
      addInto(gv("bb"), dPre);
      const dX = zeros(hs);
      matTVec(this.m("Wb"), dPre, dX);
      const base = ex.tokens[i] * hs;
      for (let r = 0; r < hs; r++) gm("emb").data[base + r] += dX[r];
      carry = zeros(hs);
      matTVec(this.m("Ub"), dPre, carry);
    }

    return { loss: total, grads };
  }

  /** Greedy decode; emits at most maxSteps actions (default: input length). */
  decode(tokens: number[], length: number, maxSteps?: number): number[] {
    const steps = maxSteps ?? length;
    const { h } = this.encode(tokens, length);
    const active = [...Array(length).keys()];
    let s = zeros(this.cfg.hs);
    let prevWord = this.wordId.get(BOS)!;
    const actions: number[] = [];
    for (let t = 0; t < steps; t++) {
      const cache = this.step(h, active, s, prevWord);
      const final = this.finalDistribution(cache);
      let best = 0;
      for (let j = 1; j < final.length; j++) if (final[j] > final[best]) best = j;
      actions.push(best);
      s = cache.s;
      prevWord = this.emittedWordId(best, tokens);
    }
    return actions;
  }

  actionsToWords(actions: number[], tokens: number[]): string[] {
    return actions.map((a) => this.cfg.vocab[this.emittedWordId(a, tokens)]);
  }

  toJSON(): string {
    const dump: Record<string, unknown> = { config: this.cfg, format: "rcr-checkpoint", version: 1 };
    const params: Record<string, number[]> = {};
    for (const [name, p] of Object.entries(this.params)) {
      params[name] = Array.from((p as Mat).data ?? (p as Vec));
    }
    dump.params = params;
    return JSON.stringify(dump);
  }

  static fromJSON(text: string): RcrModel {
    const dump = JSON.parse(text);
    if (dump.format !== "rcr-checkpoint" || dump.version !== 1) {
      throw new Error("not a v1 rcr checkpoint");
    }
    const model = new RcrModel(dump.config as RcrConfig);
    for (const [name, values] of Object.entries(dump.params as Record<string, number[]>)) {
      const p = model.params[name];
      const arr = (p as Mat).data ?? (p as Vec);
      (arr as Float64Array).set(values);
    }
    return model;
  }
}

/** Adam over the model's parameter registry; deterministic given the data order. */
export function train(
  model: RcrModel,
  examples: Example[],
  opts: { epochs: number; lr?: number; seed?: number; logEvery?: number } // eslint-disable-line
): number {
  const lr = opts.lr ?? 0.01;
  const beta1 = 0.9;
  const beta2 = 0.999;
  const eps = 1e-8;
  const mState: Record<string, Float64Array> = {};
  const vState: Record<string, Float64Array> = {};
  for (const [name, p] of Object.entries(model.params)) {
    const n = ((p as Mat).data ?? (p as Vec)).length;
    mState[name] = new Float64Array(n);
    vState[name] = new Float64Array(n);
  }
  const rng = new Rng(opts.seed ?? 7);
  let step = 0;
  let lastLoss = Infinity;
  for (let epoch = 0; epoch < opts.epochs; epoch++) {
    const order = [...examples.keys()];
    for (let i = order.length - 1; i > 0; i--) {
      const j = rng.below(i + 1);
      [order[i], order[j]] = [order[j], order[i]];
    }
    let epochLoss = 0;
    for (const idx of order) {
      const { loss, grads } = model.lossAndGradients(examples[idx]);
      if (!Number.isFinite(loss)) throw new Error(`training diverged (loss=${loss})`);
      epochLoss += loss;
      step += 1;
      const corr1 = 1 - Math.pow(beta1, step);
      const corr2 = 1 - Math.pow(beta2, step);
      for (const [name, g] of Object.entries(grads)) {
        const garr = (g as Mat).data ?? (g as Vec);
        const parr = (model.params[name] as Mat).data ?? (model.params[name] as Vec);
        const ms = mState[name];
        const vs = vState[name];
        for (let k = 0; k < garr.length; k++) {
          const gk = garr[k];
          ms[k] = beta1 * ms[k] + (1 - beta1) * gk;
          vs[k] = beta2 * vs[k] + (1 - beta2) * gk * gk;
          parr[k] -= (lr * (ms[k] / corr1)) / (Math.sqrt(vs[k] / corr2) + eps);
        }
      }
    }
    lastLoss = epochLoss / examples.length;
  }
  return lastLoss;
}
