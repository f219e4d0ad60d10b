/** Clipped-surrogate PPO over the reset/step environment.
 *
 * The action space is categorical to match the executor: the policy
 * network maps the normalized state to one logit per UE.  During
 * rollouts an action is sampled and sent as a one-hot weight vector
 * (all resource blocks to one UE for one TTI); the deployed policy
 * instead sends the softmax probabilities themselves as weights, which
 * is exactly how the executor interprets the exported network.
 * Evaluation therefore uses the softmax weights, measuring what the
 * exported file will actually do.
 *
 * Episodes are fixed-length rollouts of a continuing task -- there are
 * no terminal states, the value of the last state bootstraps the tail.
 */

import { Adam, Mlp, buildMlp, softmax, zeroGradients, scaleGradients } from "./nn.js";
import { Rng } from "./rng.js";

/** The slice of the endpoint the trainer needs (tests swap in fakes). */
export interface Env {
  reset(): Promise<number[]>;
  step(weights: number[]): Promise<{ state: number[]; reward: number }>;
}

export interface PpoConfig {
  gamma: number;
  lambda: number;
  clip: number;
  lr: number;
  epochs: number;
  minibatch: number;
  rolloutSteps: number; // one episode
  rolloutsPerIteration: number;
  evalSteps: number;
  entropyCoef: number;
  hidden: number[];
  seed: number;
}

export const DEFAULT_CONFIG: PpoConfig = {
  gamma: 0.99,
  lambda: 0.95,
  clip: 0.2,
  lr: 3e-4,
  epochs: 10,
  minibatch: 500,
  rolloutSteps: 5000,
  rolloutsPerIteration: 2, // 10000 env steps per iteration
  evalSteps: 5000,
  entropyCoef: 0.01,
  hidden: [32, 32],
  seed: 0,
};

export interface IterationStats {
  iteration: number;
  meanRolloutReward: number;
  evalReward: number;
}

interface Rollout {
  states: Float64Array[];
  actions: Int32Array;
  logProbs: Float64Array;
  rewards: Float64Array;
  values: Float64Array;
  lastValue: number;
}

/** Generalized advantage estimation over one fixed-length episode. */
export function gaeAdvantages(
  rewards: ArrayLike<number>,
  values: ArrayLike<number>,
  lastValue: number,
  gamma: number,
  lambda: number,
): { advantages: Float64Array; returns: Float64Array } {
  const n = rewards.length;
  const advantages = new Float64Array(n);
  const returns = new Float64Array(n);
  let adv = 0;
  for (let t = n - 1; t >= 0; t--) {
    const nextValue = t === n - 1 ? lastValue : values[t + 1];
    const delta = rewards[t] + gamma * nextValue - values[t];
    adv = delta + gamma * lambda * adv;
    advantages[t] = adv;
    returns[t] = adv + values[t];
  }
  return { advantages, returns };
}

export class PpoTrainer {
  readonly policy: Mlp;
  readonly value: Mlp;
  private policyOpt: Adam;
  private valueOpt: Adam;
  private rng: Rng;
  readonly cfg: PpoConfig;
  private nActions: number;
  // affine value-target normalization, frozen at the first update:
  // raw returns can be O(1e4) (long horizons x large per-step rewards),
  // which a unit-scale network head cannot regress to in useful time
  private retMean = 0;
  private retStd = 1;
  private retFrozen = false;

  constructor(stateDim: number, nActions: number, cfg: Partial<PpoConfig> = {}) {
    this.cfg = { ...DEFAULT_CONFIG, ...cfg };
    this.rng = new Rng(this.cfg.seed * 2654435761 + 1);
    this.nActions = nActions;
    // small output scale starts near the uniform policy
    this.policy = buildMlp(
      [stateDim, ...this.cfg.hidden, nActions],
      "tanh",
      this.rng,
      0.01,
    );
    this.value = buildMlp([stateDim, ...this.cfg.hidden, 1], "tanh", this.rng);
    this.policyOpt = new Adam(this.policy, this.cfg.lr);
    this.valueOpt = new Adam(this.value, this.cfg.lr);
  }

  /** Softmax action distribution for a state. */
  actionProbs(state: ArrayLike<number>): Float64Array {
    return softmax(this.policy.forward(state));
  }

  /** State value in raw return units. */
  private stateValue(state: ArrayLike<number>): number {
    return this.retMean + this.retStd * this.value.forward(state)[0];
  }

  private sampleAction(probs: Float64Array): number {
    let u = this.rng.next();
    for (let i = 0; i < probs.length; i++) {
      u -= probs[i];
      if (u <= 0) return i;
    }
    return probs.length - 1;
  }

  private async collectRollout(env: Env): Promise<Rollout> {
    const n = this.cfg.rolloutSteps;
    const states: Float64Array[] = new Array(n);
    const actions = new Int32Array(n);
    const logProbs = new Float64Array(n);
    const rewards = new Float64Array(n);
    const values = new Float64Array(n);
    let state = Float64Array.from(await env.reset());
    const oneHot = new Array<number>(this.nActions);
    for (let t = 0; t < n; t++) {
      states[t] = state;
      const probs = this.actionProbs(state);
      const a = this.sampleAction(probs);
      actions[t] = a;
      logProbs[t] = Math.log(probs[a] + 1e-12);
      values[t] = this.stateValue(state);
      oneHot.fill(0);
      oneHot[a] = 1;
      const out = await env.step(oneHot);
      rewards[t] = out.reward;
      state = Float64Array.from(out.state);
    }
    return {
      states,
      actions,
      logProbs,
      rewards,
      values,
      lastValue: this.stateValue(state),
    };
  }

  private updateFromRollouts(rollouts: Rollout[]): void {
    const states: Float64Array[] = [];
    const actions: number[] = [];
    const oldLogProbs: number[] = [];
    const advList: number[] = [];
    const retList: number[] = [];
    for (const r of rollouts) {
      const { advantages, returns } = gaeAdvantages(
        r.rewards,
        r.values,
        r.lastValue,
        this.cfg.gamma,
        this.cfg.lambda,
      );
      for (let t = 0; t < r.states.length; t++) {
        states.push(r.states[t]);
        actions.push(r.actions[t]);
        oldLogProbs.push(r.logProbs[t]);
        advList.push(advantages[t]);
        retList.push(returns[t]);
      }
    }
    const n = states.length;
    if (!this.retFrozen) {
      const m = retList.reduce((a, b) => a + b, 0) / n;
      let s = 0;
      for (const r of retList) s += (r - m) * (r - m);
      this.retMean = m;
      this.retStd = Math.sqrt(s / n) + 1e-6;
      this.retFrozen = true;
    }
    const adv = Float64Array.from(advList);
    const mean = adv.reduce((a, b) => a + b, 0) / n;
    let sq = 0;
    for (const a of adv) sq += (a - mean) * (a - mean);
    const std = Math.sqrt(sq / n) + 1e-8;
    for (let i = 0; i < n; i++) adv[i] = (adv[i] - mean) / std;

    const index = new Int32Array(n);
    for (let i = 0; i < n; i++) index[i] = i;
    const { clip, entropyCoef } = this.cfg;

    for (let epoch = 0; epoch < this.cfg.epochs; epoch++) {
      this.rng.shuffle(index);
      for (let start = 0; start < n; start += this.cfg.minibatch) {
        const batch = index.subarray(start, Math.min(start + this.cfg.minibatch, n));
        const pGrads = zeroGradients(this.policy);
        const vGrads = zeroGradients(this.value);
        for (const i of batch) {
          const s = states[i];
          const a = actions[i];
          const advI = adv[i];

          const trace = this.policy.forwardTrace(s);
          const probs = softmax(trace.output);
          const logP = Math.log(probs[a] + 1e-12);
          const ratio = Math.exp(logP - oldLogProbs[i]);
          // gradient flows only where the unclipped surrogate is active
          const active =
            (advI >= 0 && ratio <= 1 + clip) || (advI < 0 && ratio >= 1 - clip);
          let entropy = 0;
          for (let k = 0; k < probs.length; k++) {
            if (probs[k] > 0) entropy -= probs[k] * Math.log(probs[k]);
          }
          const dLogits = new Float64Array(probs.length);
          for (let k = 0; k < probs.length; k++) {
            const dLogPk = (k === a ? 1 : 0) - probs[k];
            if (active) dLogits[k] -= advI * ratio * dLogPk;
            // d(-entropy)/dlogit_k = p_k * (log p_k + H)
            dLogits[k] +=
              entropyCoef * probs[k] * (Math.log(probs[k] + 1e-12) + entropy);
          }
          this.policy.backward(trace, dLogits, pGrads);

          const vTrace = this.value.forwardTrace(s);
          const target = (retList[i] - this.retMean) / this.retStd;
          const vErr = vTrace.output[0] - target;
          this.value.backward(vTrace, Float64Array.of(vErr), vGrads);
        }
        scaleGradients(pGrads, 1 / batch.length);
        scaleGradients(vGrads, 1 / batch.length);
        this.policyOpt.step(pGrads);
        this.valueOpt.step(vGrads);
      }
    }
  }

  /** Deployed-policy evaluation: softmax probabilities as weights. */
  async evaluate(env: Env, steps = this.cfg.evalSteps): Promise<number> {
    let state = await env.reset();
    let total = 0;
    for (let t = 0; t < steps; t++) {
      const probs = this.actionProbs(state);
      const out = await env.step(Array.from(probs));
      total += out.reward;
      state = out.state;
    }
    return total / steps;
  }

  /** One PPO iteration; returns rollout and evaluation statistics. */
  async iterate(env: Env, iteration: number): Promise<IterationStats> {
    const rollouts: Rollout[] = [];
    for (let r = 0; r < this.cfg.rolloutsPerIteration; r++) {
      rollouts.push(await this.collectRollout(env));
    }
    let total = 0;
    let count = 0;
    for (const r of rollouts) {
      for (const x of r.rewards) total += x;
      count += r.rewards.length;
    }
    this.updateFromRollouts(rollouts);
    const evalReward = await this.evaluate(env);
    return { iteration, meanRolloutReward: total / count, evalReward };
  }
}
