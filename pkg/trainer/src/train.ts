/** Training entry point.
 *
 *   node dist/train.js --port 47655 --iterations 100 \
 *       --out policy.bin --curves curves.csv [--seed 0] [--hidden 32,32]
 *
 * Expects a running env endpoint (`ranric serve-env <config.yaml>`); the
 * task, UE count and normalization constants all come from the
 * endpoint's spec, so the exported file always matches the scenario it
 * was trained on.  The exported network is the best-evaluation snapshot
 * over the run.
 */

import { writeFileSync, appendFileSync } from "node:fs";
import { EnvClient } from "./envClient.js";
import { Mlp, type DenseLayer } from "./nn.js";
import { PpoTrainer, DEFAULT_CONFIG } from "./ppo.js";
import {
  savePolicyFile,
  type PolicyFile,
  type StateLayout,
} from "./policyFile.js";

interface Args {
  host: string;
  port: number;
  iterations: number;
  out: string;
  curves: string | null;
  seed: number;
  hidden: number[];
  gamma: number;
  lambda: number;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = {
    host: "127.0.0.1",
    port: 47655,
    iterations: 100,
    out: "policy.bin",
    curves: null,
    seed: 0,
    hidden: DEFAULT_CONFIG.hidden,
    gamma: DEFAULT_CONFIG.gamma,
    lambda: DEFAULT_CONFIG.lambda,
  };
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${key}`);
    switch (key) {
      case "--host":
        args.host = value;
        break;
      case "--port":
        args.port = Number(value);
        break;
      case "--iterations":
        args.iterations = Number(value);
        break;
      case "--out":
        args.out = value;
        break;
      case "--curves":
        args.curves = value;
        break;
      case "--seed":
        args.seed = Number(value);
        break;
      case "--hidden":
        args.hidden = value.split(",").map(Number);
        break;
      case "--gamma":
        // reward horizon knob: stall-avoidance tasks pay out thousands
        // of TTIs after the allocation that caused them
        args.gamma = Number(value);
        break;
      case "--lambda":
        args.lambda = Number(value);
        break;
      default:
        throw new Error(`unknown argument ${key}`);
    }
  }
  return args;
}

function snapshot(net: Mlp): DenseLayer[] {
  return net.layers.map((l) => ({
    rows: l.rows,
    cols: l.cols,
    w: Float64Array.from(l.w),
    b: Float64Array.from(l.b),
    activation: l.activation,
  }));
}

export async function main(argv = process.argv.slice(2)): Promise<void> {
  const args = parseArgs(argv);
  const env = await EnvClient.connect(args.host, args.port);
  try {
    const spec = await env.spec();
    const layout: StateLayout =
      spec.task === "video" ? "VideoTask" : "ThroughputTask";
    console.log(
      `task=${spec.task} n_ues=${spec.n_ues} state_dim=${spec.state_dim} ` +
        `iterations=${args.iterations} seed=${args.seed}`,
    );
    const trainer = new PpoTrainer(spec.state_dim, spec.n_ues, {
      seed: args.seed,
      hidden: args.hidden,
      gamma: args.gamma,
      lambda: args.lambda,
    });
    if (args.curves) {
      writeFileSync(args.curves, "iteration,mean_rollout_reward,eval_reward\n");
    }
    let bestEval = -Infinity;
    let bestLayers = snapshot(trainer.policy);
    const t0 = Date.now();
    for (let it = 1; it <= args.iterations; it++) {
      const stats = await trainer.iterate(env, it);
      if (stats.evalReward > bestEval) {
        bestEval = stats.evalReward;
        bestLayers = snapshot(trainer.policy);
      }
      if (args.curves) {
        appendFileSync(
          args.curves,
          `${it},${stats.meanRolloutReward.toFixed(6)},` +
            `${stats.evalReward.toFixed(6)}\n`,
        );
      }
      const dt = ((Date.now() - t0) / 1000).toFixed(0);
      console.log(
        `iter ${it}/${args.iterations}  rollout ${stats.meanRolloutReward.toFixed(4)}` +
          `  eval ${stats.evalReward.toFixed(4)}  best ${bestEval.toFixed(4)}  [${dt}s]`,
      );
    }
    const pf: PolicyFile = {
      stateLayout: layout,
      nUes: spec.n_ues,
      norm: {
        cqiScale: spec.norm.cqi_scale,
        backlogScale: spec.norm.backlog_scale,
        mediaScale: spec.norm.media_scale,
      },
      net: new Mlp(bestLayers),
    };
    savePolicyFile(pf, args.out);
    console.log(`wrote ${args.out} (best eval ${bestEval.toFixed(4)})`);
  } finally {
    env.close();
  }
}

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (isDirectRun) {
  main().catch((err) => {
    console.error(err);
    process.exit(1);
  });
}
