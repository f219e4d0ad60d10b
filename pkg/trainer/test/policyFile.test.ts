import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { Mlp, buildMlp } from "../src/nn.js";
import { Rng } from "../src/rng.js";
import {
  DEFAULT_NORM,
  decodePolicyFile,
  encodePolicyFile,
  type PolicyFile,
} from "../src/policyFile.js";

const GOLDEN = join(__dirname, "..", "..", "tests", "golden");

function randomPolicy(seed: number): PolicyFile {
  const rng = new Rng(seed);
  return {
    stateLayout: "ThroughputTask",
    nUes: 2,
    norm: { ...DEFAULT_NORM },
    net: buildMlp([4, 16, 2], "tanh", rng),
  };
}

describe("policy file codec", () => {
  it("round trips header, norms and parameters (as float32)", () => {
    const pf = randomPolicy(5);
    const out = decodePolicyFile(encodePolicyFile(pf));
    expect(out.stateLayout).toBe(pf.stateLayout);
    expect(out.nUes).toBe(pf.nUes);
    expect(out.norm).toEqual(pf.norm);
    expect(out.net.layers.length).toBe(pf.net.layers.length);
    for (let li = 0; li < out.net.layers.length; li++) {
      const a = out.net.layers[li];
      const b = pf.net.layers[li];
      expect(a.activation).toBe(b.activation);
      for (let i = 0; i < a.w.length; i++) {
        expect(a.w[i]).toBe(Math.fround(b.w[i]));
      }
      for (let i = 0; i < a.b.length; i++) {
        expect(a.b[i]).toBe(Math.fround(b.b[i]));
      }
    }
  });

  it("re-encoding a decoded file is byte-identical", () => {
    const blob = encodePolicyFile(randomPolicy(6));
    expect(encodePolicyFile(decodePolicyFile(blob)).equals(blob)).toBe(true);
  });

  it("rejects truncation at every offset", () => {
    const blob = encodePolicyFile(randomPolicy(7));
    for (let cut = 0; cut < blob.length; cut += 9) {
      expect(() => decodePolicyFile(blob.subarray(0, cut))).toThrow();
    }
  });

  it("rejects trailing bytes and bad magic", () => {
    const blob = encodePolicyFile(randomPolicy(8));
    expect(() =>
      decodePolicyFile(Buffer.concat([blob, Buffer.from([0])])),
    ).toThrow(/trailing/);
    const bad = Buffer.from(blob);
    bad.write("NOPE", 0, "ascii");
    expect(() => decodePolicyFile(bad)).toThrow(/magic/);
  });

  it("rejects dimension mismatches on encode", () => {
    const pf = randomPolicy(9);
    pf.nUes = 3; // net is for 2 UEs
    expect(() => encodePolicyFile(pf)).toThrow(/dim/);
  });
});

describe("golden cross-implementation vectors", () => {
  // The same files and vectors pin the executor's loader; passing both
  // sides means trainer-exported files run unchanged in the executor.
  const cases = JSON.parse(
    readFileSync(join(GOLDEN, "mlp_vectors.json"), "utf8"),
  ) as Array<{
    file: string;
    vectors: Array<{ state: number[]; output: number[] }>;
  }>;

  it.each(cases.map((c) => [c.file, c] as const))(
    "%s forward pass matches",
    (_name, c) => {
      const pf = decodePolicyFile(readFileSync(join(GOLDEN, c.file)));
      for (const vec of c.vectors) {
        const out = pf.net.forward(vec.state);
        for (let i = 0; i < out.length; i++) {
          expect(
            Math.abs(out[i] - vec.output[i]),
          ).toBeLessThanOrEqual(1e-5 * Math.abs(vec.output[i]) + 1e-6);
        }
      }
    },
  );

  it("golden files re-encode byte-identically", () => {
    for (const c of cases) {
      const blob = readFileSync(join(GOLDEN, c.file));
      expect(encodePolicyFile(decodePolicyFile(blob)).equals(blob)).toBe(true);
    }
  });
});

describe("forward pass", () => {
  it("handles relu and linear layers", () => {
    const net = new Mlp([
      {
        rows: 2,
        cols: 2,
        w: Float64Array.from([1, -1, 2, 0]),
        b: Float64Array.from([0.5, -3]),
        activation: "relu",
      },
      {
        rows: 1,
        cols: 2,
        w: Float64Array.from([1, 1]),
        b: Float64Array.from([0.25]),
        activation: "linear",
      },
    ]);
    // x = [1, 2]: relu([1-2+0.5, 2-3]) = [0, 0]; out = 0.25
    expect(net.forward([1, 2])[0]).toBeCloseTo(0.25, 12);
    // x = [2, 0]: relu([2.5, 1]) = [2.5, 1]; out = 3.75
    expect(net.forward([2, 0])[0]).toBeCloseTo(3.75, 12);
  });
});
