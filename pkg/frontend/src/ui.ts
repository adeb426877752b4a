/** DOM view: a static skeleton built once, patched from state on every
 * store change. Rendering is a function of the state only; handlers
 * report user intent back to the owner. */

import type { AppState, ParamName } from "./state";
import { PARAM_NAMES, textInBounds, wordCount } from "./state";

export interface Handlers {
  onBaseUrlApply(url: string): void;
  onTextInput(text: string): void;
  onParamInput(name: ParamName, value: number): void;
  onSuggest(): void;
  onPin(surface: string): void;
  onExclude(surface: string): void;
  onUnpin(surface: string): void;
  onUnexclude(surface: string): void;
  /** receives the rendered candidate text, straight from the DOM */
  onCopy(title: string): void;
}

const PARAM_LABELS: Record<ParamName, string> = {
  r: "target length r",
  alpha: "length strength α",
  beta: "keyword accent β",
  beam_size: "beam size",
  n_best: "candidates",
};

const PARAM_STEPS: Record<ParamName, string> = {
  r: "1",
  alpha: "0.1",
  beta: "0.1",
  beam_size: "1",
  n_best: "1",
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

export class View {
  private readonly doc: Document;
  private readonly baseUrlInput: HTMLInputElement;
  private readonly backendBadge: HTMLElement;
  private readonly textArea: HTMLTextAreaElement;
  private readonly wordCounter: HTMLElement;
  private readonly paramInputs = new Map<ParamName, HTMLInputElement>();
  private readonly suggestButton: HTMLButtonElement;
  private readonly statusLine: HTMLElement;
  private readonly errorStrip: HTMLElement;
  private readonly pinnedList: HTMLElement;
  private readonly excludedList: HTMLElement;
  private readonly keywordList: HTMLElement;
  private readonly candidateList: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly handlers: Handlers,
  ) {
    const doc = root.ownerDocument;
    this.doc = doc;

    const connection = el(doc, "section", { class: "connection" });
    const urlLabel = el(doc, "label", {}, "service URL ");
    this.baseUrlInput = el(doc, "input", {
      type: "url",
      "data-test": "base-url",
      placeholder: "http://127.0.0.1:8000",
    });
    const applyButton = el(
      doc,
      "button",
      { "data-test": "base-url-apply" },
      "connect",
    );
    applyButton.addEventListener("click", () =>
      handlers.onBaseUrlApply(this.baseUrlInput.value),
    );
    this.backendBadge = el(doc, "span", { "data-test": "backend" }, "offline");
    urlLabel.appendChild(this.baseUrlInput);
    connection.append(urlLabel, applyButton, this.backendBadge);

    const article = el(doc, "section", { class: "article" });
    this.textArea = el(doc, "textarea", {
      "data-test": "article-text",
      rows: "10",
      placeholder: "Artikeltext hier einfügen …",
    });
    this.textArea.addEventListener("input", () =>
      handlers.onTextInput(this.textArea.value),
    );
    this.wordCounter = el(doc, "span", { "data-test": "word-count" }, "0 words");
    article.append(this.textArea, this.wordCounter);

    const params = el(doc, "section", { class: "params" });
    for (const name of PARAM_NAMES) {
      const label = el(doc, "label", {}, `${PARAM_LABELS[name]} `);
      const input = el(doc, "input", {
        type: "number",
        step: PARAM_STEPS[name],
        "data-test": `param-${name}`,
      });
      input.addEventListener("change", () =>
        handlers.onParamInput(name, Number(input.value)),
      );
      label.appendChild(input);
      params.appendChild(label);
      this.paramInputs.set(name, input);
    }

    this.suggestButton = el(
      doc,
      "button",
      { "data-test": "suggest", disabled: "" },
      "suggest titles",
    );
    this.suggestButton.addEventListener("click", () => handlers.onSuggest());
    this.statusLine = el(doc, "span", { "data-test": "status" }, "");
    const actions = el(doc, "section", { class: "actions" });
    actions.append(this.suggestButton, this.statusLine);

    this.errorStrip = el(doc, "p", { class: "error", "data-test": "error" });
    this.errorStrip.hidden = true;

    const pins = el(doc, "section", { class: "pins" });
    this.pinnedList = el(doc, "ul", { "data-test": "pinned" });
    this.excludedList = el(doc, "ul", { "data-test": "excluded" });
    pins.append(
      el(doc, "h3", {}, "pinned"),
      this.pinnedList,
      el(doc, "h3", {}, "excluded"),
      this.excludedList,
    );

    const keywords = el(doc, "section", { class: "keywords" });
    this.keywordList = el(doc, "ul", { "data-test": "keywords" });
    keywords.append(el(doc, "h3", {}, "keywords"), this.keywordList);

    const candidates = el(doc, "section", { class: "candidates" });
    this.candidateList = el(doc, "ol", { "data-test": "candidates" });
    candidates.append(el(doc, "h3", {}, "suggestions"), this.candidateList);

    root.append(
      connection,
      article,
      params,
      actions,
      this.errorStrip,
      keywords,
      pins,
      candidates,
    );
  }

  update(state: AppState): void {
    const doc = this.doc;
    if (doc.activeElement !== this.baseUrlInput) {
      this.baseUrlInput.value = state.baseUrl;
    }
    this.backendBadge.textContent = state.backend
      ? `kernels: ${state.backend}`
      : "offline";

    if (doc.activeElement !== this.textArea) {
      this.textArea.value = state.text;
    }
    const words = wordCount(state.text);
    const boundsHint = state.textWordBounds
      ? ` (need ${state.textWordBounds.min}–${state.textWordBounds.max})`
      : "";
    this.wordCounter.textContent = `${words} words${boundsHint}`;

    for (const name of PARAM_NAMES) {
      const input = this.paramInputs.get(name);
      if (!input) continue;
      const bounds = state.bounds?.[name];
      if (bounds) {
        input.min = String(bounds.min);
        input.max = String(bounds.max);
      }
      if (doc.activeElement !== input) {
        input.value = String(state.params[name]);
      }
    }

    this.suggestButton.disabled = !textInBounds(state);
    this.statusLine.textContent = state.inFlight ? "generating …" : "";

    this.errorStrip.textContent = state.error ?? "";
    this.errorStrip.hidden = state.error === null;

    this.renderChips(this.pinnedList, state.pinned, "unpin", (surface) =>
      this.handlers.onUnpin(surface),
    );
    this.renderChips(this.excludedList, state.excluded, "allow", (surface) =>
      this.handlers.onUnexclude(surface),
    );
    this.renderKeywords(state);
    this.renderCandidates(state);
  }

  private renderChips(
    list: HTMLElement,
    surfaces: readonly string[],
    action: string,
    onRemove: (surface: string) => void,
  ): void {
    const doc = this.doc;
    list.replaceChildren(
      ...surfaces.map((surface) => {
        const item = el(doc, "li", { "data-surface": surface });
        item.append(el(doc, "span", {}, surface));
        const button = el(doc, "button", { "data-test": "chip-remove" }, action);
        button.addEventListener("click", () => onRemove(surface));
        item.appendChild(button);
        return item;
      }),
    );
  }

  private renderKeywords(state: AppState): void {
    const doc = this.doc;
    const keywords = state.response?.keywords ?? [];
    this.keywordList.replaceChildren(
      ...keywords.map((kw) => {
        const item = el(doc, "li", {
          "data-test": "keyword",
          "data-surface": kw.surface,
        });
        const volume =
          kw.search_volume !== null ? ` · ${kw.search_volume}` : "";
        item.append(
          el(doc, "span", {}, `#${kw.rank} ${kw.surface}${volume}`),
        );
        const pin = el(doc, "button", { "data-test": "pin" }, "pin");
        pin.addEventListener("click", () => this.handlers.onPin(kw.surface));
        const exclude = el(doc, "button", { "data-test": "exclude" }, "exclude");
        exclude.addEventListener("click", () =>
          this.handlers.onExclude(kw.surface),
        );
        item.append(pin, exclude);
        return item;
      }),
    );
  }

  private renderCandidates(state: AppState): void {
    const doc = this.doc;
    const candidates = state.response?.candidates ?? [];
    this.candidateList.replaceChildren(
      ...candidates.map((cand) => {
        const item = el(doc, "li", { "data-test": "candidate" });
        const title = el(
          doc,
          "span",
          { "data-test": "candidate-title" },
          cand.title,
        );
        const meta = el(
          doc,
          "small",
          {},
          ` score ${cand.score.toFixed(4)}` +
            (cand.matched_keywords.length
              ? ` · matches: ${cand.matched_keywords.join(", ")}`
              : ""),
        );
        const copy = el(doc, "button", { "data-test": "copy" }, "copy");
        copy.addEventListener("click", () =>
          this.handlers.onCopy(title.textContent ?? ""),
        );
        item.append(title, meta, copy);
        return item;
      }),
    );
  }
}

export function createView(root: HTMLElement, handlers: Handlers): View {
  return new View(root, handlers);
}
