import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { buildRequest, SuggestController } from "../src/controller";
import { initialState, Store, update } from "../src/state";

function jsonResponse(body: unknown, status = 200): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: "",
    json: async () => body,
  } as unknown as Response;
}

function generatePayload(title: string) {
  return {
    candidates: [{ title, score: -1.0, matched_keywords: [] }],
    keywords: [],
    params: {},
  };
}

/** A fetch that resolves after `ms`, honoring the abort signal. */
function delayedFetch(body: unknown, ms: number) {
  return (_url: RequestInfo | URL, init?: RequestInit): Promise<Response> =>
    new Promise((resolve, reject) => {
      const timer = setTimeout(() => resolve(jsonResponse(body)), ms);
      init?.signal?.addEventListener("abort", () => {
        clearTimeout(timer);
        reject(new DOMException("aborted", "AbortError"));
      });
    });
}

function readyStore(): Store {
  let state = initialState("http://svc");
  state = update(state, { type: "text-set", text: "wort ".repeat(40).trim() });
  return new Store(state);
}

describe("latest-wins request handling", () => {
  it("shows the second response when the first is slower and aborted", async () => {
    const fetches = [delayedFetch(generatePayload("SLOW"), 50), delayedFetch(generatePayload("FAST"), 10)];
    const signals: AbortSignal[] = [];
    let call = 0;
    const fetchFn = (url: RequestInfo | URL, init?: RequestInit) => {
      if (init?.signal) signals.push(init.signal);
      return fetches[call++](url, init);
    };
    const store = readyStore();
    const controller = new SuggestController(
      store,
      (base) => new ApiClient(base, fetchFn as typeof fetch),
    );

    const first = controller.suggest();
    const second = controller.suggest();
    await Promise.all([first, second]);

    expect(store.getState().response?.candidates[0].title).toBe("FAST");
    expect(store.getState().inFlight).toBe(false);
    expect(store.getState().error).toBeNull();
    expect(signals[0].aborted).toBe(true);
    expect(signals[1].aborted).toBe(false);
  });

  it("drops a stale response even if the transport ignores the abort", async () => {
    // these fetches never reject on abort; the slow one resolves last
    const bodies = [
      { body: generatePayload("SLOW"), ms: 50 },
      { body: generatePayload("FAST"), ms: 10 },
    ];
    let call = 0;
    const fetchFn = () => {
      const { body, ms } = bodies[call++];
      return new Promise<Response>((resolve) =>
        setTimeout(() => resolve(jsonResponse(body)), ms),
      );
    };
    const store = readyStore();
    const controller = new SuggestController(
      store,
      (base) => new ApiClient(base, fetchFn as typeof fetch),
    );

    const first = controller.suggest();
    const second = controller.suggest();
    await Promise.all([first, second]);

    expect(store.getState().response?.candidates[0].title).toBe("FAST");
    expect(store.getState().responseSeq).toBe(2);
  });

  it("reports a failure of the newest request only", async () => {
    const fetchFn = vi
      .fn()
      .mockRejectedValue(new TypeError("fetch failed"));
    const store = readyStore();
    const controller = new SuggestController(
      store,
      (base) => new ApiClient(base, fetchFn as typeof fetch),
    );
    await controller.suggest();
    expect(store.getState().error).toBe("fetch failed");
    expect(store.getState().inFlight).toBe(false);
  });
});

describe("request payload", () => {
  it("carries text, the five tunable params, pins and exclusions", () => {
    let state = initialState("http://svc");
    state = update(state, { type: "text-set", text: "Ein Text" });
    state = update(state, { type: "param-set", name: "r", value: 10 });
    state = update(state, { type: "keyword-pinned", surface: "Bayern" });
    state = update(state, { type: "keyword-excluded", surface: "Berlin" });
    const req = buildRequest(state);
    expect(req).toEqual({
      text: "Ein Text",
      r: 10,
      alpha: 0.6,
      beta: 1.5,
      beam_size: 10,
      n_best: 3,
      pinned: ["Bayern"],
      excluded: ["Berlin"],
    });
  });
});

describe("health probe", () => {
  const health = {
    status: "ok",
    kernel_backend: "cython",
    vocab_size: 100,
    model: { order: 3, vocab_size: 100 },
    param_bounds: {
      r: { min: 1, max: 60 },
      alpha: { min: 0, max: 2 },
      beta: { min: -10, max: 10 },
      beam_size: { min: 1, max: 50 },
      n_best: { min: 1, max: 50 },
    },
    text_word_bounds: { min: 30, max: 512 },
  };

  it("stores bounds and backend on success", async () => {
    const fetchFn = vi.fn().mockResolvedValue(jsonResponse(health));
    const store = new Store(initialState("http://svc"));
    const controller = new SuggestController(
      store,
      (base) => new ApiClient(base, fetchFn as typeof fetch),
    );
    await controller.loadHealth();
    expect(store.getState().backend).toBe("cython");
    expect(store.getState().bounds?.beam_size).toEqual({ min: 1, max: 50 });
    expect(store.getState().textWordBounds).toEqual({ min: 30, max: 512 });
  });

  it("ignores a probe answered after the base URL changed", async () => {
    let resolveFetch: (r: Response) => void = () => {};
    const fetchFn = () =>
      new Promise<Response>((resolve) => {
        resolveFetch = resolve;
      });
    const store = new Store(initialState("http://old"));
    const controller = new SuggestController(
      store,
      (base) => new ApiClient(base, fetchFn as typeof fetch),
    );
    const probe = controller.loadHealth();
    store.dispatch({ type: "base-url-set", url: "http://new" });
    resolveFetch(jsonResponse(health));
    await probe;
    expect(store.getState().backend).toBeNull();
    expect(store.getState().bounds).toBeNull();
  });
});
