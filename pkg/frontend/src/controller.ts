/** Async side of the editor: issues requests against the service and
 * feeds results back into the store. At most one request is in flight;
 * starting a new one aborts and supersedes the old (latest wins). */

import { ApiClient, type GenerateRequest } from "./api";
import type { AppState, Store } from "./state";

export type ClientFactory = (baseUrl: string) => ApiClient;

export function buildRequest(state: AppState): GenerateRequest {
  return {
    text: state.text,
    ...state.params,
    pinned: [...state.pinned],
    excluded: [...state.excluded],
  };
}

function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

export class SuggestController {
  private aborter: AbortController | null = null;

  constructor(
    private readonly store: Store,
    private readonly makeClient: ClientFactory = (base) => new ApiClient(base),
  ) {}

  async loadHealth(): Promise<void> {
    const base = this.store.getState().baseUrl;
    try {
      const health = await this.makeClient(base).health();
      // a base-URL change while the probe was out invalidates the answer
      if (this.store.getState().baseUrl !== base) return;
      this.store.dispatch({
        type: "health-loaded",
        bounds: health.param_bounds,
        textWordBounds: health.text_word_bounds,
        backend: health.kernel_backend,
      });
    } catch (err) {
      if (this.store.getState().baseUrl !== base || isAbort(err)) return;
      this.store.dispatch({
        type: "health-failed",
        message: `service unreachable: ${err instanceof Error ? err.message : String(err)}`,
      });
    }
  }

  async suggest(): Promise<void> {
    const seq = this.store.getState().seq + 1;
    this.aborter?.abort();
    const aborter = new AbortController();
    this.aborter = aborter;
    this.store.dispatch({ type: "request-started", seq });
    const state = this.store.getState();
    try {
      const response = await this.makeClient(state.baseUrl).generate(
        buildRequest(state),
        aborter.signal,
      );
      this.store.dispatch({ type: "response-received", seq, response });
    } catch (err) {
      if (isAbort(err)) return; // superseded, the newer request reports
      this.store.dispatch({
        type: "request-failed",
        seq,
        message: err instanceof Error ? err.message : String(err),
      });
    }
  }
}
