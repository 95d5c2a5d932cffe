import { FetchTransport, GatewayClient, Transport } from "../src/gateway.js";

export function gatewayUrl(): string {
  const url = process.env.GATEWAY_URL;
  if (!url) throw new Error("gateway.setup.ts did not run");
  return url;
}

/** Transport spy: records every raw exchange for response-fidelity checks. */
export class RecordingTransport implements Transport {
  inner: Transport;
  exchanges: { method: string; path: string; body?: string; status: number; text: string }[] = [];

  constructor(inner?: Transport) {
    this.inner = inner ?? new FetchTransport(gatewayUrl());
  }

  async request(method: string, path: string, body?: string) {
    const out = await this.inner.request(method, path, body);
    this.exchanges.push({ method, path, body, status: out.status, text: out.text });
    return out;
  }

  last(path: string) {
    for (let i = this.exchanges.length - 1; i >= 0; i -= 1) {
      if (this.exchanges[i].path === path) return this.exchanges[i];
    }
    throw new Error(`no exchange recorded for ${path}`);
  }
}

export function liveClient(): { client: GatewayClient; transport: RecordingTransport } {
  const transport = new RecordingTransport();
  return { client: new GatewayClient(transport), transport };
}
