// Keyboard control: drive keys are held-state, light keys fire commands.
//
// W/Up      drive forward        S/Down    drive reverse
// A/Left    steer left           D/Right   steer right
// G low beam, H high beam, L left indicator, R right indicator, E hazard.
// Held drive and steer keys combine into one teleop frame per UI tick.

import { CommandFrame, TeleopFrame } from "./types.js";

export interface KeyState {
  forward: boolean;
  reverse: boolean;
  left: boolean;
  right: boolean;
}

export const IDLE_KEYS: KeyState = {
  forward: false,
  reverse: false,
  left: false,
  right: false,
};

const DRIVE_KEYS: Record<string, keyof KeyState> = {
  KeyW: "forward",
  ArrowUp: "forward",
  KeyS: "reverse",
  ArrowDown: "reverse",
  KeyA: "left",
  ArrowLeft: "left",
  KeyD: "right",
  ArrowRight: "right",
};

const COMMAND_KEYS: Record<string, CommandFrame> = {
  KeyG: { type: "command", name: "headlights", args: { beam: "low" } },
  KeyH: { type: "command", name: "headlights", args: { beam: "high" } },
  KeyL: { type: "command", name: "indicator_left", args: {} },
  KeyR: { type: "command", name: "indicator_right", args: {} },
  KeyE: { type: "command", name: "hazard", args: {} },
};

export function updateKeys(state: KeyState, code: string, down: boolean): KeyState {
  const field = DRIVE_KEYS[code];
  if (field === undefined || state[field] === down) return state;
  return { ...state, [field]: down };
}

export function isDriveKey(code: string): boolean {
  return code in DRIVE_KEYS;
}

/** Command emitted on key *press* (not hold), or null for non-command keys. */
export function commandForKey(code: string): CommandFrame | null {
  const frame = COMMAND_KEYS[code];
  return frame ? { ...frame, args: { ...frame.args } } : null;
}

/** The combined teleop frame for the currently held drive keys. */
export function teleopFrame(state: KeyState): TeleopFrame {
  const throttle = (state.forward ? 1 : 0) + (state.reverse ? -1 : 0);
  const steering = (state.right ? 1 : 0) + (state.left ? -1 : 0);
  return { type: "teleop", throttle, steering };
}

export const TELEOP_RATE_HZ = 30;

/**
 * Wire the document's key events to a sender. Teleop frames go out at a
 * fixed 30 Hz cadence while any drive key is held (plus one zero frame on
 * full release); command keys send immediately on keydown.
 */
export function attachKeyboard(
  target: EventTarget,
  send: (frame: TeleopFrame | CommandFrame) => void,
  isTextInput: (el: EventTarget | null) => boolean = defaultIsTextInput,
): () => void {
  let keys = IDLE_KEYS;
  let timer: ReturnType<typeof setInterval> | null = null;

  const pump = () => {
    send(teleopFrame(keys));
    if (keys === IDLE_KEYS && timer !== null) {
      clearInterval(timer);
      timer = null;
    }
  };

  const setKeys = (next: KeyState) => {
    if (next === keys) return;
    keys = anyHeld(next) ? next : IDLE_KEYS;
    if (timer === null) {
      timer = setInterval(pump, 1000 / TELEOP_RATE_HZ);
      send(teleopFrame(keys));
    }
  };

  const onKeyDown = (event: Event) => {
    const e = event as KeyboardEvent;
    if (isTextInput(e.target)) return;
    const command = commandForKey(e.code);
    if (command) {
      send(command);
      e.preventDefault();
      return;
    }
    if (isDriveKey(e.code)) {
      setKeys(updateKeys(keys, e.code, true));
      e.preventDefault();
    }
  };

  const onKeyUp = (event: Event) => {
    const e = event as KeyboardEvent;
    if (isDriveKey(e.code)) setKeys(updateKeys(keys, e.code, false));
  };

  target.addEventListener("keydown", onKeyDown);
  target.addEventListener("keyup", onKeyUp);
  return () => {
    target.removeEventListener("keydown", onKeyDown);
    target.removeEventListener("keyup", onKeyUp);
    if (timer !== null) clearInterval(timer);
  };
}

function anyHeld(state: KeyState): boolean {
  return state.forward || state.reverse || state.left || state.right;
}

function defaultIsTextInput(el: EventTarget | null): boolean {
  return el instanceof HTMLElement &&
    (el.tagName === "INPUT" || el.tagName === "TEXTAREA" || el.isContentEditable);
}
