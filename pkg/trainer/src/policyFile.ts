/** Reader/writer for the portable policy-network file (`MLPW`).
 *
 * Byte layout mirrors the executor's loader exactly (see
 * ../docs/policy_file.md): little-endian header freezing the state
 * layout, UE count and normalization constants, then row-major float32
 * dense layers.  The golden vectors under ../tests/golden tie the two
 * implementations together.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { Mlp, type Activation, type DenseLayer } from "./nn.js";

export const MAGIC = "MLPW";
export const FORMAT_VERSION = 1;

export type StateLayout = "ThroughputTask" | "VideoTask";
const LAYOUT_TAGS: Record<StateLayout, number> = {
  ThroughputTask: 0,
  VideoTask: 1,
};
const ACTIVATION_TAGS: Activation[] = ["tanh", "relu", "linear"];

export interface NormConstants {
  cqiScale: number;
  backlogScale: number;
  mediaScale: number;
}

export const DEFAULT_NORM: NormConstants = {
  cqiScale: 15.0,
  backlogScale: 3_000_000.0,
  mediaScale: 6.0,
};

export interface PolicyFile {
  stateLayout: StateLayout;
  nUes: number;
  norm: NormConstants;
  net: Mlp;
}

export function stateDim(layout: StateLayout, nUes: number): number {
  return (layout === "ThroughputTask" ? 2 : 3) * nUes;
}

const HEADER_SIZE = 4 + 2 + 1 + 2 + 4 * 3 + 1;
const LAYER_HEADER_SIZE = 4 + 4 + 1;

export function encodePolicyFile(pf: PolicyFile): Buffer {
  if (pf.net.inputDim !== stateDim(pf.stateLayout, pf.nUes)) {
    throw new Error(
      `network input dim ${pf.net.inputDim} != state dim ` +
        `${stateDim(pf.stateLayout, pf.nUes)}`,
    );
  }
  if (pf.net.outputDim !== pf.nUes) {
    throw new Error(`network output dim ${pf.net.outputDim} != n_ues ${pf.nUes}`);
  }
  let size = HEADER_SIZE;
  for (const l of pf.net.layers) size += LAYER_HEADER_SIZE + 4 * l.rows * (l.cols + 1);
  const buf = Buffer.alloc(size);
  let off = 0;
  off += buf.write(MAGIC, off, "ascii");
  off = buf.writeUInt16LE(FORMAT_VERSION, off);
  off = buf.writeUInt8(LAYOUT_TAGS[pf.stateLayout], off);
  off = buf.writeUInt16LE(pf.nUes, off);
  off = buf.writeFloatLE(pf.norm.cqiScale, off);
  off = buf.writeFloatLE(pf.norm.backlogScale, off);
  off = buf.writeFloatLE(pf.norm.mediaScale, off);
  off = buf.writeUInt8(pf.net.layers.length, off);
  for (const l of pf.net.layers) {
    off = buf.writeUInt32LE(l.rows, off);
    off = buf.writeUInt32LE(l.cols, off);
    off = buf.writeUInt8(ACTIVATION_TAGS.indexOf(l.activation), off);
    for (let i = 0; i < l.w.length; i++) off = buf.writeFloatLE(l.w[i], off);
    for (let i = 0; i < l.b.length; i++) off = buf.writeFloatLE(l.b[i], off);
  }
  return buf;
}

export function decodePolicyFile(buf: Buffer): PolicyFile {
  if (buf.length < HEADER_SIZE) throw new Error(`truncated at byte ${buf.length}`);
  if (buf.toString("ascii", 0, 4) !== MAGIC) throw new Error("bad magic");
  let off = 4;
  const version = buf.readUInt16LE(off);
  off += 2;
  if (version !== FORMAT_VERSION) throw new Error(`unknown version ${version}`);
  const layoutTag = buf.readUInt8(off);
  off += 1;
  const stateLayout = (Object.keys(LAYOUT_TAGS) as StateLayout[]).find(
    (k) => LAYOUT_TAGS[k] === layoutTag,
  );
  if (stateLayout === undefined) throw new Error(`unknown layout tag ${layoutTag}`);
  const nUes = buf.readUInt16LE(off);
  off += 2;
  const norm: NormConstants = {
    cqiScale: buf.readFloatLE(off),
    backlogScale: buf.readFloatLE(off + 4),
    mediaScale: buf.readFloatLE(off + 8),
  };
  off += 12;
  const nLayers = buf.readUInt8(off);
  off += 1;
  const layers: DenseLayer[] = [];
  for (let i = 0; i < nLayers; i++) {
    if (off + LAYER_HEADER_SIZE > buf.length)
      throw new Error(`truncated at byte ${off}`);
    const rows = buf.readUInt32LE(off);
    const cols = buf.readUInt32LE(off + 4);
    const actTag = buf.readUInt8(off + 8);
    off += LAYER_HEADER_SIZE;
    if (actTag >= ACTIVATION_TAGS.length)
      throw new Error(`layer ${i}: unknown activation tag ${actTag}`);
    const nbytes = 4 * rows * (cols + 1);
    if (off + nbytes > buf.length) throw new Error(`truncated at byte ${off}`);
    const w = new Float64Array(rows * cols);
    for (let j = 0; j < w.length; j++) w[j] = buf.readFloatLE(off + 4 * j);
    off += 4 * rows * cols;
    const b = new Float64Array(rows);
    for (let j = 0; j < rows; j++) b[j] = buf.readFloatLE(off + 4 * j);
    off += 4 * rows;
    layers.push({ rows, cols, w, b, activation: ACTIVATION_TAGS[actTag] });
  }
  if (off !== buf.length)
    throw new Error(`${buf.length - off} trailing bytes at offset ${off}`);
  return { stateLayout, nUes, norm, net: new Mlp(layers) };
}

export function savePolicyFile(pf: PolicyFile, path: string): void {
  writeFileSync(path, encodePolicyFile(pf));
}

export function loadPolicyFile(path: string): PolicyFile {
  return decodePolicyFile(readFileSync(path));
}
