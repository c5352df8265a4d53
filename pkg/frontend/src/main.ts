/** Browser wiring: one active session per tab, driven entirely by
 * service round trips. */

import { ServiceClient, type SessionOptions } from "./api.js";
import {
  choose,
  connect,
  inspectPullback,
  undoTo,
  type ExplorerState,
} from "./explorer.js";
import { renderHtml } from "./render.js";

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (found === null) throw new Error(`missing #${id}`);
  return found as T;
}

const app = element<HTMLElement>("app");
const netInput = element<HTMLTextAreaElement>("net");
const serviceInput = element<HTMLInputElement>("service");
const alphabetInput = element<HTMLInputElement>("alphabet");
const depthInput = element<HTMLInputElement>("depth");

let state: ExplorerState | null = null;
let busy = false;

function paint(): void {
  app.innerHTML = state === null ? "" : renderHtml(state.view);
}

async function transition(
  step: (current: ExplorerState) => Promise<ExplorerState>,
): Promise<void> {
  if (busy || state === null) return;
  busy = true;
  try {
    state = await step(state);
  } finally {
    busy = false;
  }
  paint();
}

function readOptions(): SessionOptions {
  const options: SessionOptions = {};
  if (alphabetInput.value.trim() !== "") {
    options.alphabet = alphabetInput.value.trim();
  }
  if (depthInput.value.trim() !== "") {
    options.depth = Number(depthInput.value);
  }
  return options;
}

element<HTMLButtonElement>("connect").addEventListener("click", async () => {
  if (busy) return;
  busy = true;
  try {
    const client = new ServiceClient(serviceInput.value.trim());
    state = await connect(client, netInput.value, readOptions());
  } finally {
    busy = false;
  }
  paint();
});

element<HTMLButtonElement>("pullback").addEventListener("click", () => {
  void transition(inspectPullback);
});

app.addEventListener("click", (event) => {
  const target = event.target;
  if (!(target instanceof HTMLButtonElement)) return;
  if (target.dataset.undo !== undefined) {
    const keep = Number(target.dataset.undo);
    void transition((current) => undoTo(current, keep));
    return;
  }
  if (target.dataset.i !== undefined && target.dataset.ram !== undefined) {
    const offer = { i: Number(target.dataset.i), ram: target.dataset.ram };
    void transition((current) => choose(current, offer));
  }
});
