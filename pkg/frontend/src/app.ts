/** Browser entry point: binds the controller to the DOM. */

import { TriageApi } from "./api.js";
import { ChatController } from "./controller.js";
import { renderApp } from "./render.js";

function apiBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  if (fromQuery) {
    return fromQuery.replace(/\/$/, "");
  }
  const meta = document.querySelector<HTMLMetaElement>('meta[name="medtriage-api"]');
  if (meta?.content) {
    return meta.content.replace(/\/$/, "");
  }
  return "";
}

export function mount(root: HTMLElement): ChatController {
  const controller = new ChatController(new TriageApi(apiBaseUrl()));

  const redraw = () => {
    const input = root.querySelector<HTMLInputElement>("#symptom-input");
    const draft = input?.value ?? "";
    root.innerHTML = renderApp(controller.state);
    const next = root.querySelector<HTMLInputElement>("#symptom-input");
    if (next && !next.disabled) {
      next.value = draft;
      next.focus();
    }
  };
  controller.onChange = redraw;

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const chipButton = target.closest<HTMLButtonElement>("button[data-symptom]");
    if (chipButton && !chipButton.disabled) {
      void controller.answerChip(
        chipButton.dataset.symptom ?? "",
        chipButton.dataset.answer === "yes" ? "yes" : "no",
      );
      return;
    }
    if (target.closest("#done")) {
      void controller.done();
      return;
    }
    if (target.closest("button[data-retry]")) {
      void controller.retry();
      return;
    }
    const row = target.closest<HTMLTableRowElement>("tr[data-rank]");
    if (row) {
      void controller.openDetail(Number(row.dataset.rank));
    }
  });

  root.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = root.querySelector<HTMLInputElement>("#symptom-input");
    if (!input) {
      return;
    }
    const text = input.value;
    input.value = "";
    void controller.submitText(text);
  });

  redraw();
  void controller.start();
  return controller;
}

const rootElement = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootElement) {
  mount(rootElement);
}
