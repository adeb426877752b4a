/** Application state as a pure function of user inputs and the last
 * accepted response. All transitions go through `update`, which never
 * mutates its input. */

import type { GenerateResponse, ParamBounds } from "./api";

export interface Params {
  r: number;
  alpha: number;
  beta: number;
  beam_size: number;
  n_best: number;
}

export type ParamName = keyof Params;

export const PARAM_NAMES: readonly ParamName[] = [
  "r",
  "alpha",
  "beta",
  "beam_size",
  "n_best",
];

const INTEGER_PARAMS: ReadonlySet<ParamName> = new Set([
  "r",
  "beam_size",
  "n_best",
]);

export const DEFAULT_PARAMS: Params = {
  r: 12,
  alpha: 0.6,
  beta: 1.5,
  beam_size: 10,
  n_best: 3,
};

export interface AppState {
  baseUrl: string;
  /** bounds advertised by /health; null until loaded */
  bounds: Record<string, ParamBounds> | null;
  textWordBounds: { min: number; max: number } | null;
  backend: string | null;
  text: string;
  params: Params;
  pinned: readonly string[];
  excluded: readonly string[];
  /** id of the newest request issued; 0 before the first one */
  seq: number;
  /** true while the newest request has not settled */
  inFlight: boolean;
  /** last accepted response and the request id that produced it */
  response: GenerateResponse | null;
  responseSeq: number | null;
  error: string | null;
}

export function initialState(baseUrl: string): AppState {
  return {
    baseUrl,
    bounds: null,
    textWordBounds: null,
    backend: null,
    text: "",
    params: { ...DEFAULT_PARAMS },
    pinned: [],
    excluded: [],
    seq: 0,
    inFlight: false,
    response: null,
    responseSeq: null,
    error: null,
  };
}

export type AppEvent =
  | { type: "base-url-set"; url: string }
  | {
      type: "health-loaded";
      bounds: Record<string, ParamBounds>;
      textWordBounds: { min: number; max: number };
      backend: string;
    }
  | { type: "health-failed"; message: string }
  | { type: "text-set"; text: string }
  | { type: "param-set"; name: ParamName; value: number }
  | { type: "keyword-pinned"; surface: string }
  | { type: "keyword-excluded"; surface: string }
  | { type: "pin-removed"; surface: string }
  | { type: "exclusion-removed"; surface: string }
  | { type: "request-started"; seq: number }
  | { type: "response-received"; seq: number; response: GenerateResponse }
  | { type: "request-failed"; seq: number; message: string };

/** Clamp a proposed parameter value into the advertised bounds.
 * Integer parameters are rounded; non-finite input falls back to the
 * default. Without loaded bounds only the shape is sanitized. */
export function clampParam(
  name: ParamName,
  value: number,
  bounds: Record<string, ParamBounds> | null,
): number {
  let v = Number.isFinite(value) ? value : DEFAULT_PARAMS[name];
  if (INTEGER_PARAMS.has(name)) v = Math.round(v);
  const b = bounds?.[name];
  if (b) v = Math.min(b.max, Math.max(b.min, v));
  return v;
}

function clampAll(
  params: Params,
  bounds: Record<string, ParamBounds> | null,
): Params {
  const out = { ...params };
  for (const name of PARAM_NAMES) {
    out[name] = clampParam(name, params[name], bounds);
  }
  return out;
}

function without(list: readonly string[], surface: string): string[] {
  return list.filter((s) => s !== surface);
}

export function wordCount(text: string): number {
  return text.split(/\s+/).filter(Boolean).length;
}

export function textInBounds(state: AppState): boolean {
  if (state.textWordBounds === null) return wordCount(state.text) > 0;
  const n = wordCount(state.text);
  return n >= state.textWordBounds.min && n <= state.textWordBounds.max;
}

export function update(state: AppState, event: AppEvent): AppState {
  switch (event.type) {
    case "base-url-set":
      return { ...state, baseUrl: event.url.trim(), bounds: null, backend: null };
    case "health-loaded":
      return {
        ...state,
        bounds: event.bounds,
        textWordBounds: event.textWordBounds,
        backend: event.backend,
        // parameters set before the bounds arrived must obey them too
        params: clampAll(state.params, event.bounds),
        error: null,
      };
    case "health-failed":
      return { ...state, backend: null, error: event.message };
    case "text-set":
      return { ...state, text: event.text };
    case "param-set":
      return {
        ...state,
        params: {
          ...state.params,
          [event.name]: clampParam(event.name, event.value, state.bounds),
        },
      };
    case "keyword-pinned":
      return {
        ...state,
        pinned: [...without(state.pinned, event.surface), event.surface],
        excluded: without(state.excluded, event.surface),
      };
    case "keyword-excluded":
      return {
        ...state,
        excluded: [...without(state.excluded, event.surface), event.surface],
        pinned: without(state.pinned, event.surface),
      };
    case "pin-removed":
      return { ...state, pinned: without(state.pinned, event.surface) };
    case "exclusion-removed":
      return { ...state, excluded: without(state.excluded, event.surface) };
    case "request-started":
      return { ...state, seq: event.seq, inFlight: true, error: null };
    case "response-received":
      // latest wins: a response from a superseded request changes nothing
      if (event.seq !== state.seq) return state;
      return {
        ...state,
        inFlight: false,
        response: event.response,
        responseSeq: event.seq,
        error: null,
      };
    case "request-failed":
      if (event.seq !== state.seq) return state;
      return { ...state, inFlight: false, error: event.message };
  }
}

export type Listener = (state: AppState) => void;

/** Minimal event store around the pure reducer. */
export class Store {
  private listeners: Listener[] = [];

  constructor(private state: AppState) {}

  getState(): AppState {
    return this.state;
  }

  dispatch(event: AppEvent): AppState {
    const next = update(this.state, event);
    if (next !== this.state) {
      this.state = next;
      for (const listener of this.listeners) listener(next);
    }
    return next;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}
