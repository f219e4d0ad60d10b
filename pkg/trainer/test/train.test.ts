import { describe, expect, it } from "vitest";
import { parseArgs } from "../src/train.js";

describe("parseArgs", () => {
  it("applies defaults", () => {
    const args = parseArgs([]);
    expect(args.port).toBe(47655);
    expect(args.iterations).toBe(100);
    expect(args.curves).toBeNull();
  });

  it("parses every flag", () => {
    const args = parseArgs([
      "--host", "10.0.0.1",
      "--port", "48000",
      "--iterations", "25",
      "--out", "net.bin",
      "--curves", "c.csv",
      "--seed", "4",
      "--hidden", "64,64",
      "--gamma", "0.999",
      "--lambda", "0.97",
    ]);
    expect(args).toEqual({
      host: "10.0.0.1",
      port: 48000,
      iterations: 25,
      out: "net.bin",
      curves: "c.csv",
      seed: 4,
      hidden: [64, 64],
      gamma: 0.999,
      lambda: 0.97,
    });
  });

  it("rejects unknown or dangling flags", () => {
    expect(() => parseArgs(["--bogus", "1"])).toThrow(/unknown/);
    expect(() => parseArgs(["--port"])).toThrow(/missing value/);
  });
});
