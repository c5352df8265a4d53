/** Thin fetch client for the normalization service.
 *
 * Every reply keeps the exact response body text alongside the parsed
 * document, so callers can compare server state byte for byte.
 */

import type {
  ChoiceOffer,
  ConflictDocument,
  ErrorDocument,
  NormalizeDocument,
  OrthogonalDocument,
  SessionDocument,
} from "./documents.js";

export interface ServiceReply<T> {
  status: number;
  raw: string;
  doc: T;
}

export interface SessionOptions {
  alphabet?: string;
  depth?: number;
  fuel?: number;
}

export interface NormalizeRequest {
  net: string;
  mode?: "weak" | "strong";
  alphabet?: string;
  depth?: number;
  fuel?: number;
}

export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  private async call<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<ServiceReply<T>> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const response = await fetch(this.baseUrl + path, init);
    const raw = await response.text();
    return { status: response.status, raw, doc: JSON.parse(raw) as T };
  }

  createSession(
    net: string,
    options: SessionOptions = {},
  ): Promise<ServiceReply<SessionDocument | ErrorDocument>> {
    const body: Record<string, unknown> = { net };
    if (options.alphabet !== undefined) body.alphabet = options.alphabet;
    if (options.depth !== undefined) body.depth = options.depth;
    if (options.fuel !== undefined) body.fuel = options.fuel;
    return this.call("POST", "/sessions", body);
  }

  getSession(
    id: string,
  ): Promise<ServiceReply<SessionDocument | ErrorDocument>> {
    return this.call("GET", `/sessions/${encodeURIComponent(id)}`);
  }

  postChoice(
    id: string,
    choice: ChoiceOffer,
  ): Promise<ServiceReply<SessionDocument | ConflictDocument | ErrorDocument>> {
    return this.call(
      "POST",
      `/sessions/${encodeURIComponent(id)}/choice`,
      choice,
    );
  }

  normalize(
    request: NormalizeRequest,
  ): Promise<ServiceReply<NormalizeDocument | ErrorDocument>> {
    return this.call("POST", "/normalize", request);
  }

  orthogonal(
    net: string,
  ): Promise<ServiceReply<OrthogonalDocument | ErrorDocument>> {
    return this.call("POST", "/orthogonal", { net });
  }
}
