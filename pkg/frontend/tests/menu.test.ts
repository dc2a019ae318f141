import { describe, expect, it } from "vitest";

import { attachMenu, MenuElements, validBridgeInput } from "../src/menu.js";
import { CommandFrame } from "../src/types.js";
import { sampleTelemetry } from "./helpers.js";

function buildMenuDom(): MenuElements {
  const make = <T extends HTMLElement>(tag: string): T =>
    document.createElement(tag) as T;
  return {
    host: make<HTMLInputElement>("input"),
    port: make<HTMLInputElement>("input"),
    connect: make<HTMLButtonElement>("button"),
    status: make<HTMLElement>("span"),
    error: make<HTMLElement>("div"),
    reset: make<HTMLButtonElement>("button"),
    mode: make<HTMLButtonElement>("button"),
    sceneLight: make<HTMLButtonElement>("button"),
  };
}

describe("bridge endpoint validation", () => {
  it("accepts a routable host and port", () => {
    expect(validBridgeInput("10.0.0.2", "4567")).toBeNull();
    expect(validBridgeInput("127.0.0.1", "1")).toBeNull();
  });

  it.each([
    ["abc", "4567"],
    ["10.0.0", "4567"],
    ["300.0.0.1", "4567"],
    ["127.0.0.1", "abc"],
    ["127.0.0.1", "0"],
    ["127.0.0.1", "70000"],
    ["127.0.0.1", "45.6"],
  ])("rejects %s:%s", (host, port) => {
    expect(validBridgeInput(host, port)).not.toBeNull();
  });
});

describe("menu wiring", () => {
  it("invalid port shows an inline error, disables connect, sends nothing", () => {
    const el = buildMenuDom();
    const sent: CommandFrame[] = [];
    attachMenu(el, (f) => sent.push(f));
    el.host.value = "127.0.0.1";
    el.port.value = "abc";
    el.port.dispatchEvent(new Event("input"));
    expect(el.error.textContent).not.toBe("");
    expect(el.connect.disabled).toBe(true);
    el.connect.click();
    expect(sent).toHaveLength(0);
  });

  it("valid endpoint sends set_bridge on connect", () => {
    const el = buildMenuDom();
    const sent: CommandFrame[] = [];
    attachMenu(el, (f) => sent.push(f));
    el.host.value = "10.0.0.2";
    el.port.value = "5001";
    el.port.dispatchEvent(new Event("input"));
    el.connect.click();
    expect(sent).toEqual([{ type: "command", name: "set_bridge",
                            args: { host: "10.0.0.2", port: 5001 } }]);
  });

  it("reset and mode buttons send their commands", () => {
    const el = buildMenuDom();
    const sent: CommandFrame[] = [];
    attachMenu(el, (f) => sent.push(f));
    el.reset.click();
    el.mode.click();
    el.sceneLight.click();
    expect(sent.map((f) => f.name)).toEqual(
      ["reset", "toggle_mode", "scene_light"]);
  });

  it("telemetry refresh drives status text and mode label", () => {
    const el = buildMenuDom();
    const refresh = attachMenu(el, () => {});
    refresh(sampleTelemetry({ bridge_status: "connected",
                              driving_mode: "autonomous" }));
    expect(el.status.textContent).toBe("Connected");
    expect(el.connect.disabled).toBe(true);
    expect(el.mode.textContent).toBe("Mode: Autonomous");
    refresh(sampleTelemetry({ bridge_status: "disconnected" }));
    expect(el.status.textContent).toBe("Disconnected");
    expect(el.mode.textContent).toBe("Mode: Manual");
  });
});
