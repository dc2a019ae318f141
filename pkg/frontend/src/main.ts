// Composition root: connect to the simulator, wire keyboard/menu/canvas, and
// render from the latest snapshot only.

import { attachKeyboard } from "./keyboard.js";
import { buildHud, renderHud } from "./hud.js";
import { attachMenu, MenuElements } from "./menu.js";
import { connectSim, fetchScene } from "./net.js";
import { render } from "./render.js";
import { Scene, Telemetry, UiFrame } from "./types.js";
import { applyPan, applyWheelZoom, initialView } from "./view.js";

const STALE_AFTER_MS = 500;   // drop to the placeholder past this age

function element<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

function main(): void {
  const canvas = element<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2D canvas unavailable");
  const hudPanel = element<HTMLElement>("hud-rows");
  const overlay = element<HTMLElement>("overlay");

  let scene: Scene | null = null;
  let latest: Telemetry | null = null;
  let latestAt = 0;
  let view = initialView();

  const wsUrl = `ws://${location.host}/ws`;
  const link = connectSim(wsUrl, (t) => {
    latest = t;
    latestAt = performance.now();
    view = { ...view, night: !t.scene_light };
    renderHud(hudPanel, t);
    refreshMenu(t);
  }, (open) => {
    document.body.classList.toggle("link-down", !open);
  });
  const send = (frame: UiFrame) => {
    // teleop only steers in manual mode; skip it during autonomy to keep
    // the simulator's discard counter meaningful
    if (frame.type === "teleop" &&
        latest !== null && latest.driving_mode === "autonomous") {
      return;
    }
    link.send(frame);
  };

  fetchScene().then((s) => {
    scene = s;
  }).catch((err) => {
    overlay.textContent = `scene load failed: ${err}`;
  });

  buildHud(hudPanel);
  attachKeyboard(window, send);

  const menuEls: MenuElements = {
    host: element<HTMLInputElement>("bridge-host"),
    port: element<HTMLInputElement>("bridge-port"),
    connect: element<HTMLButtonElement>("bridge-connect"),
    status: element<HTMLElement>("bridge-status"),
    error: element<HTMLElement>("bridge-error"),
    reset: element<HTMLButtonElement>("btn-reset"),
    mode: element<HTMLButtonElement>("btn-mode"),
    sceneLight: element<HTMLButtonElement>("btn-scene-light"),
  };
  const refreshMenu = attachMenu(menuEls, send);

  // panel toggles on the toolbar
  const menuPanel = element<HTMLElement>("menu-panel");
  const hudContainer = element<HTMLElement>("hud-panel");
  element<HTMLButtonElement>("btn-toggle-menu").addEventListener("click", () => {
    menuPanel.classList.toggle("hidden");
  });
  element<HTMLButtonElement>("btn-toggle-hud").addEventListener("click", () => {
    hudContainer.classList.toggle("hidden");
  });

  // pan with mouse drag, zoom with the wheel
  let dragging = false;
  let lastX = 0, lastY = 0;
  canvas.addEventListener("mousedown", (e) => {
    dragging = true;
    lastX = e.clientX;
    lastY = e.clientY;
  });
  window.addEventListener("mouseup", () => { dragging = false; });
  window.addEventListener("mousemove", (e) => {
    if (!dragging) return;
    view = applyPan(view, e.clientX - lastX, e.clientY - lastY);
    lastX = e.clientX;
    lastY = e.clientY;
  });
  canvas.addEventListener("wheel", (e) => {
    view = applyWheelZoom(view, e.deltaY);
    e.preventDefault();
  }, { passive: false });
  canvas.addEventListener("dblclick", () => {
    view = { ...view, follow: true };
  });

  const resize = () => {
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
  };
  window.addEventListener("resize", resize);
  resize();

  const frame = () => {
    const fresh = latest !== null &&
      performance.now() - latestAt < STALE_AFTER_MS;
    const shown = fresh ? latest : null;
    if (shown && view.follow) {
      view = { ...view, centerX: shown.vehicle.x, centerY: shown.vehicle.y };
    }
    const blinkOn = Math.floor(performance.now() / 500) % 2 === 0; // 1 Hz
    render(ctx, scene, shown, view, blinkOn);
    overlay.textContent = fresh ? "" : "Disconnected";
    overlay.classList.toggle("hidden", fresh);
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

main();
