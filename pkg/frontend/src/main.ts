// Browser entry point: create or attach to a session, then re-render the
// controller's view tree into the page on every change.

import { httpApi } from "./api.js";
import { mount } from "./dom.js";
import { SessionController } from "./app.js";

const api = httpApi("", (url, init) => fetch(url, init));
const controller = new SessionController(api);

function redraw(): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren(mount(controller.render(), document) as unknown as Node);
}

controller.onChange = redraw;

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const existing = params.get("session");
  if (existing) {
    await controller.open(existing);
    return;
  }
  const form = document.getElementById("create-form") as HTMLFormElement | null;
  form?.addEventListener("submit", async (event) => {
    event.preventDefault();
    const design = (document.getElementById("design") as HTMLTextAreaElement).value;
    const annotations = (document.getElementById("annotations") as HTMLTextAreaElement)
      .value;
    const modular = (document.getElementById("modular") as HTMLInputElement).checked;
    const view = await api.createSession(design, annotations, modular);
    const url = new URL(window.location.href);
    url.searchParams.set("session", view.id);
    window.history.replaceState(null, "", url.toString());
    form.hidden = true;
    await controller.open(view.id);
  });
}

void boot();
redraw();
