/** Node-side transports for tests: loopback and a spawned Python service. */

import { spawn, type ChildProcess } from "node:child_process";

import type { Transport } from "../src/protocol.js";

/** Transport over a child process's stdio (the service's --stdio mode). */
export class StdioTransport implements Transport {
  private handler: ((chunk: Uint8Array) => void) | null = null;

  constructor(private child: ChildProcess) {
    child.stdout!.on("data", (chunk: Buffer) => {
      if (this.handler) this.handler(new Uint8Array(chunk));
    });
  }

  send(bytes: Uint8Array): void {
    this.child.stdin!.write(bytes);
  }

  onData(handler: (chunk: Uint8Array) => void): void {
    this.handler = handler;
  }

  close(): void {
    this.child.stdin!.end();
    this.child.kill();
  }
}

export function spawnPlayground(): { child: ChildProcess; transport: StdioTransport } {
  const child = spawn("python3", ["-m", "cgakit.cli", "playground", "--stdio"], {
    stdio: ["pipe", "pipe", "inherit"],
  });
  return { child, transport: new StdioTransport(child) };
}

/** In-memory transport pair for client unit tests. */
export class LoopbackTransport implements Transport {
  private handler: ((chunk: Uint8Array) => void) | null = null;
  sent: Uint8Array[] = [];
  closed = false;

  send(bytes: Uint8Array): void {
    this.sent.push(bytes);
  }

  onData(handler: (chunk: Uint8Array) => void): void {
    this.handler = handler;
  }

  close(): void {
    this.closed = true;
  }

  /** Push service bytes back to the client. */
  feed(bytes: Uint8Array): void {
    if (this.handler) this.handler(bytes);
  }
}
