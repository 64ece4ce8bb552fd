/** Minimal dense helpers over Float64Array; matrices are row-major. */

import { Rng } from "./rng.js";

export type Vec = Float64Array;
export type Mat = { rows: number; cols: number; data: Float64Array };

export function zeros(n: number): Vec {
  return new Float64Array(n);
}

export function mat(rows: number, cols: number): Mat {
  return { rows, cols, data: new Float64Array(rows * cols) };
}

export function randMat(rows: number, cols: number, rng: Rng, scale: number): Mat {
  const m = mat(rows, cols);
  for (let i = 0; i < m.data.length; i++) m.data[i] = rng.normal() * scale;
  return m;
}

export function randVec(n: number, rng: Rng, scale: number): Vec {
  const v = zeros(n);
  for (let i = 0; i < n; i++) v[i] = rng.normal() * scale;
  return v;
}

/** out = M x (M: rows x cols, x: cols). */
export function matVec(m: Mat, x: Vec, out: Vec): Vec {
  for (let r = 0; r < m.rows; r++) {
    let acc = 0;
    const base = r * m.cols;
    for (let c = 0; c < m.cols; c++) acc += m.data[base + c] * x[c];
    out[r] = acc;
  }
  return out;
}

/** out = M^T x (x: rows, out: cols). */
export function matTVec(m: Mat, x: Vec, out: Vec): Vec {
  out.fill(0);
  for (let r = 0; r < m.rows; r++) {
    const base = r * m.cols;
    const xr = x[r];
    if (xr === 0) continue;
    for (let c = 0; c < m.cols; c++) out[c] += m.data[base + c] * xr;
  }
  return out;
}

/** grad += outer(gy, x): gy indexes rows, x indexes cols. */
export function addOuter(grad: Mat, gy: Vec, x: Vec): void {
  for (let r = 0; r < grad.rows; r++) {
    const base = r * grad.cols;
    const g = gy[r];
    if (g === 0) continue;
    for (let c = 0; c < grad.cols; c++) grad.data[base + c] += g * x[c];
  }
}

export function addInto(dst: Vec, src: Vec, scale = 1): void {
  for (let i = 0; i < dst.length; i++) dst[i] += src[i] * scale;
}

export function dot(a: Vec, b: Vec): number {
  let acc = 0;
  for (let i = 0; i < a.length; i++) acc += a[i] * b[i];
  return acc;
}

export function tanhVec(x: Vec, out: Vec): Vec {
  for (let i = 0; i < x.length; i++) out[i] = Math.tanh(x[i]);
  return out;
}

/** Softmax over the `active` index subset; inactive entries get 0. */
export function softmaxMasked(logits: Vec, active: number[], out: Vec): Vec {
  out.fill(0);
  let max = -Infinity;
  for (const i of active) if (logits[i] > max) max = logits[i];
  let total = 0;
  for (const i of active) {
    const e = Math.exp(logits[i] - max);
    out[i] = e;
    total += e;
  }
  for (const i of active) out[i] /= total;
  return out;
}

export function sigmoid(x: number): number {
  return 1 / (1 + Math.exp(-x));
}
