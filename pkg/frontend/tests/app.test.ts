import { describe, expect, it } from "vitest";

import { SessionController } from "../src/app.js";
import { byClass } from "../src/dom.js";
import { FakeApi } from "./fakes.js";

async function openController(api = new FakeApi()) {
  const controller = new SessionController(api);
  await controller.open("abc123def456");
  return { controller, api };
}

describe("SessionController", () => {
  it("builds the view purely from service responses", async () => {
    const { controller } = await openController();
    const tree = controller.render();
    expect(byClass(tree, "prompt")[0].text).toContain("IF_pc");
    expect(byClass(tree, "node")).toHaveLength(6);
  });

  it("reloading reconstructs an identical view", async () => {
    const a = await openController();
    const b = await openController();
    expect(JSON.stringify(a.controller.render())).toEqual(
      JSON.stringify(b.controller.render()),
    );
  });

  it("accept flips the view to verified", async () => {
    const { controller } = await openController();
    await controller.respond("accept");
    expect(controller.view!.status).toBe("verified");
    const tree = controller.render();
    expect(byClass(tree, "status-verified")).toHaveLength(1);
    // terminal state: controls disabled, graph replaced by the placeholder
    const buttons = byClass(tree, "accept");
    expect(buttons[0].attrs["disabled"]).toBe("disabled");
  });

  it("reject renders the next suggestion", async () => {
    const { controller } = await openController();
    await controller.respond("reject");
    const tree = controller.render();
    expect(byClass(tree, "prompt")[0].text).toContain("IF_inst");
  });

  it("a failed response mutates nothing and offers retry", async () => {
    const { controller, api } = await openController();
    const before = JSON.stringify(controller.view);
    api.failNext = true;
    await controller.respond("accept");
    expect(JSON.stringify(controller.view)).toEqual(before);
    expect(controller.error).toContain("request failed");
    const tree = controller.render();
    expect(byClass(tree, "retry")).toHaveLength(1);
    await controller.retry();
    expect(controller.view!.status).toBe("verified");
  });

  it("ignores answers on terminal sessions", async () => {
    const { controller, api } = await openController();
    await controller.respond("accept");
    const calls = api.calls.length;
    await controller.respond("accept");
    expect(api.calls.length).toBe(calls); // no further requests
  });

  it("selecting a node surfaces its detail", async () => {
    const { controller } = await openController();
    controller.select("ID_instr");
    const tree = controller.render();
    const detail = byClass(tree, "detail");
    expect(JSON.stringify(detail)).toContain("round 1");
  });
});
