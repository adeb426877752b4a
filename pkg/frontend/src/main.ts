import { copyText } from "./clipboard";
import { SuggestController } from "./controller";
import { initialState, Store } from "./state";
import { createView } from "./ui";

const BASE_URL_KEY = "seogen.baseUrl";
const DEFAULT_BASE_URL = "http://127.0.0.1:8000";

function startingBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  if (fromQuery) return fromQuery;
  try {
    return window.localStorage.getItem(BASE_URL_KEY) ?? DEFAULT_BASE_URL;
  } catch {
    return DEFAULT_BASE_URL;
  }
}

function rememberBaseUrl(url: string): void {
  try {
    window.localStorage.setItem(BASE_URL_KEY, url);
  } catch {
    // private mode: the session still works, the choice is just not saved
  }
}

function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");

  const store = new Store(initialState(startingBaseUrl()));
  const controller = new SuggestController(store);

  const view = createView(root, {
    onBaseUrlApply: (url) => {
      store.dispatch({ type: "base-url-set", url });
      rememberBaseUrl(store.getState().baseUrl);
      void controller.loadHealth();
    },
    onTextInput: (text) => store.dispatch({ type: "text-set", text }),
    onParamInput: (name, value) =>
      store.dispatch({ type: "param-set", name, value }),
    onSuggest: () => void controller.suggest(),
    onPin: (surface) => store.dispatch({ type: "keyword-pinned", surface }),
    onExclude: (surface) =>
      store.dispatch({ type: "keyword-excluded", surface }),
    onUnpin: (surface) => store.dispatch({ type: "pin-removed", surface }),
    onUnexclude: (surface) =>
      store.dispatch({ type: "exclusion-removed", surface }),
    onCopy: (title) => {
      void copyText(title).catch(() => {
        // selection stays possible by hand; nothing else to do
      });
    },
  });

  store.subscribe((state) => view.update(state));
  view.update(store.getState());
  void controller.loadHealth();
}

start();
