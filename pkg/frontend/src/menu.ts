// Menu panel: bridge endpoint fields, connection status, reset, driving-mode
// toggle and the scene light (day/night) toggle.

import { CommandFrame, Telemetry } from "./types.js";

export interface MenuElements {
  host: HTMLInputElement;
  port: HTMLInputElement;
  connect: HTMLButtonElement;
  status: HTMLElement;
  error: HTMLElement;
  reset: HTMLButtonElement;
  mode: HTMLButtonElement;
  sceneLight: HTMLButtonElement;
}

const IPV4 = /^(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})$/;

export function validBridgeInput(host: string, portText: string): string | null {
  const m = IPV4.exec(host.trim());
  if (!m || m.slice(1).some((octet) => Number(octet) > 255)) {
    return "enter a valid IPv4 address";
  }
  const port = Number(portText.trim());
  if (!Number.isInteger(port) || port < 1 || port > 65535) {
    return "port must be an integer in 1..65535";
  }
  return null;
}

export function attachMenu(
  el: MenuElements,
  send: (frame: CommandFrame) => void,
): (t: Telemetry) => void {
  const revalidate = () => {
    const problem = validBridgeInput(el.host.value, el.port.value);
    el.error.textContent = problem ?? "";
    el.connect.disabled = problem !== null;
    return problem === null;
  };
  el.host.addEventListener("input", revalidate);
  el.port.addEventListener("input", revalidate);

  el.connect.addEventListener("click", () => {
    if (!revalidate()) return;
    send({ type: "command", name: "set_bridge",
           args: { host: el.host.value.trim(), port: Number(el.port.value) } });
  });
  el.reset.addEventListener("click", () => {
    send({ type: "command", name: "reset", args: {} });
  });
  el.mode.addEventListener("click", () => {
    send({ type: "command", name: "toggle_mode", args: {} });
  });
  el.sceneLight.addEventListener("click", () => {
    send({ type: "command", name: "scene_light", args: {} });
  });
  revalidate();

  // per-telemetry refresh of the live labels
  return (t: Telemetry) => {
    const connected = t.bridge_status === "connected";
    el.status.textContent = connected ? "Connected" : "Disconnected";
    el.status.classList.toggle("ok", connected);
    el.connect.disabled = connected || el.error.textContent !== "";
    el.mode.textContent =
      `Mode: ${t.driving_mode === "autonomous" ? "Autonomous" : "Manual"}`;
    el.sceneLight.textContent = t.scene_light ? "Scene Light: On" : "Scene Light: Off";
    if (document.activeElement !== el.host && document.activeElement !== el.port) {
      const [host, port] = splitTarget(t.bridge_target);
      if (host && el.host.value === "") el.host.value = host;
      if (port && el.port.value === "") el.port.value = port;
    }
  };
}

function splitTarget(target: string): [string, string] {
  const idx = target.lastIndexOf(":");
  if (idx < 0) return [target, ""];
  return [target.slice(0, idx), target.slice(idx + 1)];
}
