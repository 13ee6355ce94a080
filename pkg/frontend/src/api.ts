// Thin fetch wrapper. Each logical panel load gets a sequence number so a
// slow earlier response can never overwrite a newer one.

import type { Fetched } from "./pages.js";

export class ApiClient {
  private seq = 0;

  constructor(private baseUrl = "") {}

  /** Bump the sequence; responses started before the bump are stale. */
  nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  isCurrent(seq: number): boolean {
    return seq === this.seq;
  }

  async get<T>(path: string): Promise<Fetched<T>> {
    try {
      const resp = await fetch(this.baseUrl + path, {
        headers: { Accept: "application/json" },
      });
      if (!resp.ok) {
        let message = `API error ${resp.status}`;
        try {
          const body = await resp.json();
          if (body && typeof body.message === "string") message = body.message;
        } catch {
          // non-JSON error body; keep the status message
        }
        return { ok: false, error: message };
      }
      return { ok: true, data: (await resp.json()) as T };
    } catch (err) {
      return { ok: false, error: `API unreachable: ${String(err)}` };
    }
  }
}
