/** Client for the reset/step training endpoint.
 *
 * Line-delimited JSON over a local TCP socket, strictly sequential: one
 * request in flight at a time (the server processes requests in order,
 * so pipelining would only complicate error attribution).  See
 * ../docs/env_protocol.md for the protocol.
 */

import { Socket, connect } from "node:net";

export interface EnvSpec {
  n_ues: number;
  task: "throughput" | "video";
  state_dim: number;
  rntis: number[];
  norm: { cqi_scale: number; backlog_scale: number; media_scale: number };
}

export interface StepResult {
  state: number[];
  reward: number;
  ranTime: number;
}

interface Pending {
  resolve: (reply: Record<string, unknown>) => void;
  reject: (err: Error) => void;
}

export class EnvClient {
  private sock: Socket;
  private buffer = "";
  private queue: Pending[] = [];
  private closed = false;

  private constructor(sock: Socket) {
    this.sock = sock;
    sock.setNoDelay(true);
    sock.on("data", (chunk) => this.onData(chunk));
    sock.on("error", (err) => this.failAll(err));
    sock.on("close", () => {
      this.closed = true;
      this.failAll(new Error("connection closed"));
    });
  }

  static connect(host: string, port: number, timeoutMs = 10_000): Promise<EnvClient> {
    return new Promise((resolve, reject) => {
      const sock = connect({ host, port });
      const timer = setTimeout(
        () => reject(new Error(`connect timeout to ${host}:${port}`)),
        timeoutMs,
      );
      sock.once("connect", () => {
        clearTimeout(timer);
        resolve(new EnvClient(sock));
      });
      sock.once("error", (err) => {
        clearTimeout(timer);
        reject(err);
      });
    });
  }

  private onData(chunk: Buffer): void {
    this.buffer += chunk.toString("utf8");
    let nl: number;
    while ((nl = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, nl);
      this.buffer = this.buffer.slice(nl + 1);
      const pending = this.queue.shift();
      if (!pending) continue; // unsolicited line; nothing to do
      try {
        const reply = JSON.parse(line) as Record<string, unknown>;
        if (typeof reply.error === "string") {
          pending.reject(new Error(`env error: ${reply.error}`));
        } else {
          pending.resolve(reply);
        }
      } catch {
        pending.reject(new Error(`unparseable reply: ${line.slice(0, 200)}`));
      }
    }
  }

  private failAll(err: Error): void {
    const queue = this.queue;
    this.queue = [];
    for (const p of queue) p.reject(err);
  }

  private request(req: Record<string, unknown>): Promise<Record<string, unknown>> {
    if (this.closed) return Promise.reject(new Error("client closed"));
    return new Promise((resolve, reject) => {
      this.queue.push({ resolve, reject });
      this.sock.write(JSON.stringify(req) + "\n");
    });
  }

  async spec(): Promise<EnvSpec> {
    return (await this.request({ cmd: "spec" })) as unknown as EnvSpec;
  }

  async reset(): Promise<number[]> {
    const reply = await this.request({ cmd: "reset" });
    return reply.state as number[];
  }

  async step(weights: number[]): Promise<StepResult> {
    const reply = await this.request({ cmd: "step", weights });
    return {
      state: reply.state as number[],
      reward: reply.reward as number,
      ranTime: reply.ran_time as number,
    };
  }

  close(): void {
    if (!this.closed) {
      this.closed = true;
      this.sock.write(JSON.stringify({ cmd: "close" }) + "\n");
      this.sock.end();
    }
  }
}
