// Request/reply pairing over the WebSocket. The protocol answers every
// client message with exactly one reply in order, so a FIFO of expected
// request kinds is enough to route replies to the right handler.

import {
  FrameMsg,
  HelloMsg,
  PROTOCOL_VERSION,
  ServerMsg,
  SetParamsMsg,
  parseServerMessage,
} from "./protocol.js";

export type RequestKind = "hello" | "frame" | "set_params";

export interface ConnectionHandlers {
  onHello(session: string): void;
  onFrameState(state: ServerMsg): void;
  onParamsReply(reply: ServerMsg): void;
  onProtocolError(detail: string): void;
  onClose(): void;
}

export class DemoConnection {
  private ws: WebSocket;
  private expected: RequestKind[] = [];
  private handlers: ConnectionHandlers;

  constructor(url: string, hello: Omit<HelloMsg, "type">, handlers: ConnectionHandlers) {
    this.handlers = handlers;
    this.ws = new WebSocket(url);
    this.ws.onopen = () => {
      this.send({ type: "hello", ...hello }, "hello");
    };
    this.ws.onmessage = (event) => this.route(String(event.data));
    this.ws.onclose = () => handlers.onClose();
    this.ws.onerror = () => handlers.onClose();
  }

  get open(): boolean {
    return this.ws.readyState === WebSocket.OPEN;
  }

  close(): void {
    this.ws.close();
  }

  sendFrame(msg: Omit<FrameMsg, "type">): boolean {
    if (!this.open) return false;
    this.send({ type: "frame", ...msg }, "frame");
    return true;
  }

  sendParams(msg: Omit<SetParamsMsg, "type">): boolean {
    if (!this.open) return false;
    this.send({ type: "set_params", ...msg }, "set_params");
    return true;
  }

  private send(msg: HelloMsg | FrameMsg | SetParamsMsg, kind: RequestKind): void {
    this.ws.send(JSON.stringify(msg));
    this.expected.push(kind);
  }

  private route(raw: string): void {
    const kind = this.expected.shift();
    const msg = parseServerMessage(raw);
    if (!msg) {
      this.handlers.onProtocolError(`unparseable server message: ${raw.slice(0, 120)}`);
      return;
    }
    if (kind === "hello") {
      if (msg.type === "hello") this.handlers.onHello(msg.session);
      else this.handlers.onProtocolError(`handshake failed: ${JSON.stringify(msg)}`);
      return;
    }
    if (kind === "set_params") {
      this.handlers.onParamsReply(msg);
      return;
    }
    this.handlers.onFrameState(msg);
  }
}

export function defaultServiceUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("service") ?? "ws://127.0.0.1:9460";
}

export const HELLO_DEFAULTS = { version: PROTOCOL_VERSION, L: 0.6, body_mass: 70 };
