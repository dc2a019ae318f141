// WebSocket link to the simulator's UI endpoint with auto-reconnect.

import { Scene, Telemetry, UiFrame } from "./types.js";

export interface SimLink {
  send(frame: UiFrame): void;
  close(): void;
}

export function connectSim(
  url: string,
  onTelemetry: (t: Telemetry) => void,
  onState: (connected: boolean) => void,
): SimLink {
  let ws: WebSocket | null = null;
  let closed = false;

  const open = () => {
    if (closed) return;
    ws = new WebSocket(url);
    ws.onopen = () => onState(true);
    ws.onmessage = (event) => {
      try {
        const doc = JSON.parse(event.data);
        if (doc.type === "telemetry") onTelemetry(doc as Telemetry);
      } catch {
        console.warn("non-JSON frame from simulator");
      }
    };
    ws.onclose = () => {
      onState(false);
      ws = null;
      if (!closed) setTimeout(open, 1000);
    };
    ws.onerror = () => ws?.close();
  };
  open();

  return {
    send(frame: UiFrame) {
      if (ws && ws.readyState === WebSocket.OPEN) {
        ws.send(JSON.stringify(frame));
      }
    },
    close() {
      closed = true;
      ws?.close();
    },
  };
}

export async function fetchScene(baseUrl = ""): Promise<Scene> {
  const resp = await fetch(`${baseUrl}/api/scene`);
  if (!resp.ok) throw new Error(`scene fetch failed: ${resp.status}`);
  return (await resp.json()) as Scene;
}
