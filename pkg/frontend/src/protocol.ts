/**
 * ga-playground/1 protocol: message types, framing, and a serializing client.
 *
 * Framing is "<decimal byte length>\n<json>" in both directions.  The client
 * sends one request at a time and resolves responses by echoed id, so a
 * mutation is never in flight concurrently with another request touching the
 * same object.  No algebra happens here: all coefficient math comes back from
 * the service.
 */

export const PROTOCOL_VERSION = "ga-playground/1";

export type Kind =
  | "point"
  | "sphere"
  | "plane"
  | "line"
  | "circle"
  | "point_pair"
  | "imaginary"
  | "unknown";

export interface PosePayload {
  translation: [number, number, number];
  rotation: [number, number, number, number]; // (w, x, y, z)
  scale: number;
}

export interface ObjectRecord {
  name: string;
  coeffs: number[]; // 32 entries, canonical blade order
  kind: Kind;
  grade: number;
  params: Record<string, unknown>;
}

export interface SampleRecord {
  alpha: number;
  coeffs: number[];
  kind: Kind;
  grade: number;
  params: Record<string, unknown>;
}

export interface PlaygroundResponse {
  proto: string;
  id: unknown;
  status: "ok" | "error";
  error?: string;
  objects?: ObjectRecord[];
  samples?: SampleRecord[];
}

export type RequestPayload = Record<string, unknown>;

export interface PlaygroundRequest extends RequestPayload {
  proto: string;
  id: number;
  op: string;
}

// --------------------------------------------------------------------------
// framing

const encoder = new TextEncoder();
const decoder = new TextDecoder();

export function encodeFrame(message: object): Uint8Array {
  const body = encoder.encode(JSON.stringify(message));
  const head = encoder.encode(`${body.byteLength}\n`);
  const out = new Uint8Array(head.byteLength + body.byteLength);
  out.set(head, 0);
  out.set(body, head.byteLength);
  return out;
}

/** Incremental frame parser for chunked byte streams. */
export class FrameReader {
  private buffer = new Uint8Array(0);

  push(chunk: Uint8Array): object[] {
    const merged = new Uint8Array(this.buffer.byteLength + chunk.byteLength);
    merged.set(this.buffer, 0);
    merged.set(chunk, this.buffer.byteLength);
    this.buffer = merged;

    const messages: object[] = [];
    for (;;) {
      const newline = this.buffer.indexOf(0x0a);
      if (newline < 0) break;
      const lengthText = decoder.decode(this.buffer.subarray(0, newline));
      const length = Number.parseInt(lengthText, 10);
      if (!Number.isFinite(length) || length < 0) {
        throw new Error(`bad frame header: ${JSON.stringify(lengthText)}`);
      }
      const end = newline + 1 + length;
      if (this.buffer.byteLength < end) break;
      const body = this.buffer.subarray(newline + 1, end);
      messages.push(JSON.parse(decoder.decode(body)));
      this.buffer = this.buffer.subarray(end);
    }
    return messages;
  }
}

// --------------------------------------------------------------------------
// transport and client

export interface Transport {
  send(bytes: Uint8Array): void;
  onData(handler: (chunk: Uint8Array) => void): void;
  close(): void;
}

interface Pending {
  resolve: (resp: PlaygroundResponse) => void;
  reject: (err: Error) => void;
  request: PlaygroundRequest;
}

/**
 * Serializing request pipeline: at most one request is on the wire at any
 * moment; the rest wait in a FIFO.  The per-object "no concurrent mutation"
 * rule follows directly.
 */
export class PlaygroundClient {
  private reader = new FrameReader();
  private nextId = 1;
  private inflight: Pending | null = null;
  private queue: Pending[] = [];

  constructor(private transport: Transport) {
    transport.onData((chunk) => this.handleChunk(chunk));
  }

  get busy(): boolean {
    return this.inflight !== null;
  }

  get queuedCount(): number {
    return this.queue.length;
  }

  request(op: string, payload: RequestPayload = {}): Promise<PlaygroundResponse> {
    const request: PlaygroundRequest = {
      proto: PROTOCOL_VERSION,
      id: this.nextId++,
      op,
      ...payload,
    };
    return new Promise((resolve, reject) => {
      this.queue.push({ resolve, reject, request });
      this.pump();
    });
  }

  /** Resolves only when the service reports ok; rejects on error status. */
  async call(op: string, payload: RequestPayload = {}): Promise<PlaygroundResponse> {
    const resp = await this.request(op, payload);
    if (resp.status !== "ok") {
      throw new Error(resp.error ?? "playground error");
    }
    return resp;
  }

  close(): void {
    this.transport.close();
    const err = new Error("client closed");
    if (this.inflight) this.inflight.reject(err);
    for (const pending of this.queue) pending.reject(err);
    this.inflight = null;
    this.queue = [];
  }

  private pump(): void {
    if (this.inflight || this.queue.length === 0) return;
    this.inflight = this.queue.shift()!;
    this.transport.send(encodeFrame(this.inflight.request));
  }

  private handleChunk(chunk: Uint8Array): void {
    for (const message of this.reader.push(chunk)) {
      const resp = message as PlaygroundResponse;
      const pending = this.inflight;
      if (!pending) continue; // unsolicited; drop
      if (resp.id !== pending.request.id) {
        pending.reject(new Error(`response id ${resp.id} does not match ${pending.request.id}`));
        this.inflight = null;
        this.pump();
        continue;
      }
      this.inflight = null;
      pending.resolve(resp);
      this.pump();
    }
  }
}

/** Browser transport: a WebSocket bridge forwarding to the TCP service. */
export class WebSocketTransport implements Transport {
  private handler: ((chunk: Uint8Array) => void) | null = null;

  constructor(private socket: WebSocket) {
    socket.binaryType = "arraybuffer";
    socket.onmessage = (event) => {
      if (this.handler) this.handler(new Uint8Array(event.data as ArrayBuffer));
    };
  }

  send(bytes: Uint8Array): void {
    this.socket.send(bytes);
  }

  onData(handler: (chunk: Uint8Array) => void): void {
    this.handler = handler;
  }

  close(): void {
    this.socket.close();
  }
}
