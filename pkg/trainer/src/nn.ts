/** Minimal dense networks with manual backprop and Adam.
 *
 * Parameters live in Float64Array for training stability; the policy
 * file writer narrows them to float32 on export, which is also what the
 * executor runs.  Activations mirror the policy-file format: tanh,
 * relu, or linear.
 */

import { Rng } from "./rng.js";

export type Activation = "tanh" | "relu" | "linear";

export interface DenseLayer {
  rows: number; // output dim
  cols: number; // input dim
  w: Float64Array; // row-major (rows x cols)
  b: Float64Array; // (rows)
  activation: Activation;
}

export class Mlp {
  layers: DenseLayer[];

  constructor(layers: DenseLayer[]) {
    for (let i = 1; i < layers.length; i++) {
      if (layers[i].cols !== layers[i - 1].rows) {
        throw new Error(
          `layer ${i} input dim ${layers[i].cols} != previous output ${layers[i - 1].rows}`,
        );
      }
    }
    this.layers = layers;
  }

  get inputDim(): number {
    return this.layers[0].cols;
  }

  get outputDim(): number {
    return this.layers[this.layers.length - 1].rows;
  }

  forward(x: ArrayLike<number>): Float64Array {
    let cur: Float64Array = Float64Array.from(x as ArrayLike<number>);
    for (const layer of this.layers) {
      cur = affine(layer, cur);
      applyActivation(layer.activation, cur);
    }
    return cur;
  }

  /** Forward pass keeping per-layer pre/post activations for backprop. */
  forwardTrace(x: ArrayLike<number>): Trace {
    const inputs: Float64Array[] = [Float64Array.from(x as ArrayLike<number>)];
    const pre: Float64Array[] = [];
    for (const layer of this.layers) {
      const z = affine(layer, inputs[inputs.length - 1]);
      pre.push(Float64Array.from(z));
      applyActivation(layer.activation, z);
      inputs.push(z);
    }
    return { inputs, pre, output: inputs[inputs.length - 1] };
  }

  /**
   * Backpropagate dLoss/dOutput through the trace, accumulating
   * parameter gradients into `grads` (same shapes as the layers).
   * Returns dLoss/dInput.
   */
  backward(trace: Trace, dOut: Float64Array, grads: Gradients): Float64Array {
    let delta = Float64Array.from(dOut);
    for (let li = this.layers.length - 1; li >= 0; li--) {
      const layer = this.layers[li];
      const z = trace.pre[li];
      for (let r = 0; r < layer.rows; r++) {
        delta[r] *= activationGrad(layer.activation, z[r]);
      }
      const input = trace.inputs[li];
      const gw = grads.w[li];
      const gb = grads.b[li];
      for (let r = 0; r < layer.rows; r++) {
        const d = delta[r];
        gb[r] += d;
        const base = r * layer.cols;
        for (let c = 0; c < layer.cols; c++) gw[base + c] += d * input[c];
      }
      const next = new Float64Array(layer.cols);
      for (let r = 0; r < layer.rows; r++) {
        const d = delta[r];
        const base = r * layer.cols;
        for (let c = 0; c < layer.cols; c++) next[c] += d * layer.w[base + c];
      }
      delta = next;
    }
    return delta;
  }
}

export interface Trace {
  inputs: Float64Array[]; // post-activation per layer, inputs[0] = x
  pre: Float64Array[]; // pre-activation per layer
  output: Float64Array;
}

export interface Gradients {
  w: Float64Array[];
  b: Float64Array[];
}

function affine(layer: DenseLayer, x: Float64Array): Float64Array {
  const out = new Float64Array(layer.rows);
  for (let r = 0; r < layer.rows; r++) {
    let acc = layer.b[r];
    const base = r * layer.cols;
    for (let c = 0; c < layer.cols; c++) acc += layer.w[base + c] * x[c];
    out[r] = acc;
  }
  return out;
}

function applyActivation(act: Activation, z: Float64Array): void {
  if (act === "tanh") for (let i = 0; i < z.length; i++) z[i] = Math.tanh(z[i]);
  else if (act === "relu")
    for (let i = 0; i < z.length; i++) z[i] = Math.max(z[i], 0);
}

function activationGrad(act: Activation, preActivation: number): number {
  if (act === "tanh") {
    const t = Math.tanh(preActivation);
    return 1 - t * t;
  }
  if (act === "relu") return preActivation > 0 ? 1 : 0;
  return 1;
}

/** He/Xavier-style scaled gaussian init, zero biases. */
export function buildMlp(
  dims: number[],
  hiddenActivation: Activation,
  rng: Rng,
  outputScale = 1.0,
): Mlp {
  const layers: DenseLayer[] = [];
  for (let i = 0; i < dims.length - 1; i++) {
    const rows = dims[i + 1];
    const cols = dims[i];
    const last = i === dims.length - 2;
    const scale = (last ? outputScale : 1.0) / Math.sqrt(cols);
    const w = new Float64Array(rows * cols);
    for (let j = 0; j < w.length; j++) w[j] = rng.normal() * scale;
    layers.push({
      rows,
      cols,
      w,
      b: new Float64Array(rows),
      activation: last ? "linear" : hiddenActivation,
    });
  }
  return new Mlp(layers);
}

export function zeroGradients(net: Mlp): Gradients {
  return {
    w: net.layers.map((l) => new Float64Array(l.rows * l.cols)),
    b: net.layers.map((l) => new Float64Array(l.rows)),
  };
}

export function scaleGradients(grads: Gradients, s: number): void {
  for (const g of grads.w) for (let i = 0; i < g.length; i++) g[i] *= s;
  for (const g of grads.b) for (let i = 0; i < g.length; i++) g[i] *= s;
}

/** Adam with bias correction; one instance per network. */
export class Adam {
  private mW: Float64Array[];
  private vW: Float64Array[];
  private mB: Float64Array[];
  private vB: Float64Array[];
  private t = 0;

  constructor(
    private net: Mlp,
    private lr: number,
    private beta1 = 0.9,
    private beta2 = 0.999,
    private eps = 1e-8,
  ) {
    this.mW = net.layers.map((l) => new Float64Array(l.rows * l.cols));
    this.vW = net.layers.map((l) => new Float64Array(l.rows * l.cols));
    this.mB = net.layers.map((l) => new Float64Array(l.rows));
    this.vB = net.layers.map((l) => new Float64Array(l.rows));
  }

  /** Apply one descent step from accumulated gradients. */
  step(grads: Gradients): void {
    this.t += 1;
    const c1 = 1 - Math.pow(this.beta1, this.t);
    const c2 = 1 - Math.pow(this.beta2, this.t);
    for (let li = 0; li < this.net.layers.length; li++) {
      this.update(this.net.layers[li].w, grads.w[li], this.mW[li], this.vW[li], c1, c2);
      this.update(this.net.layers[li].b, grads.b[li], this.mB[li], this.vB[li], c1, c2);
    }
  }

  private update(
    p: Float64Array,
    g: Float64Array,
    m: Float64Array,
    v: Float64Array,
    c1: number,
    c2: number,
  ): void {
    for (let i = 0; i < p.length; i++) {
      m[i] = this.beta1 * m[i] + (1 - this.beta1) * g[i];
      v[i] = this.beta2 * v[i] + (1 - this.beta2) * g[i] * g[i];
      p[i] -= (this.lr * (m[i] / c1)) / (Math.sqrt(v[i] / c2) + this.eps);
    }
  }
}

export function softmax(logits: ArrayLike<number>): Float64Array {
  let max = -Infinity;
  for (let i = 0; i < logits.length; i++) max = Math.max(max, logits[i]);
  const out = new Float64Array(logits.length);
  let sum = 0;
  for (let i = 0; i < logits.length; i++) {
    out[i] = Math.exp(logits[i] - max);
    sum += out[i];
  }
  for (let i = 0; i < out.length; i++) out[i] /= sum;
  return out;
}
