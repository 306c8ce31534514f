// Wire format shared with the teleop service. One JSON object per frame,
// every frame versioned with "v" and discriminated by "type".

export const PROTOCOL_VERSION = 1;

export interface ObjectSnapshot {
  name: string;
  kind: string;
  state: number[];
  held: boolean;
}

export interface Metrics {
  total_time: number;
  control_time: number;
  consistency: number | null;
  toggles: number;
  complete: boolean;
}

export interface SceneObject {
  name: string;
  kind: string;
  anchor: number[];
  params: Record<string, unknown>;
}

export interface Scene {
  env: string;
  links: number[];
  base: number[];
  horizon: number;
  latent_dim: number;
  latent_spaces: number;
  objects: SceneObject[];
  regions: Record<string, number[]>;
}

export interface HelloFrame {
  type: 'hello';
  tick: number;
  protocol: number;
  scene: Scene;
  tick_rate: number;
  deadzone: number;
  mode: string;
  spaces: number;
}

export interface StateFrame {
  type: 'state';
  tick: number;
  joints: number[];
  ee: number[];
  objects: ObjectSnapshot[];
  mode: string;
  metrics: Metrics;
  flags: { input_reused: boolean; ik_fallback: boolean };
  events: string[];
}

export interface ByeFrame {
  type: 'bye';
  tick: number;
  report: Record<string, unknown>;
}

export interface ErrorFrame {
  type: 'error';
  tick: number;
  error: string;
}

export type ServerFrame = HelloFrame | StateFrame | ByeFrame | ErrorFrame;

export type ParseResult =
  | { ok: true; frame: ServerFrame }
  | { ok: false; error: string };

const SERVER_TYPES = new Set(['hello', 'state', 'bye', 'error']);

export function parseServerFrame(text: string): ParseResult {
  let raw: Record<string, unknown>;
  try {
    raw = JSON.parse(text);
  } catch {
    return { ok: false, error: 'frame is not JSON' };
  }
  if (typeof raw !== 'object' || raw === null) {
    return { ok: false, error: 'frame is not an object' };
  }
  if (raw['v'] !== PROTOCOL_VERSION) {
    return { ok: false, error: `protocol version mismatch: got ${raw['v']}` };
  }
  const type = raw['type'];
  if (typeof type !== 'string' || !SERVER_TYPES.has(type)) {
    return { ok: false, error: `unknown frame type ${JSON.stringify(type)}` };
  }
  if (typeof raw['tick'] !== 'number') {
    return { ok: false, error: 'frame carries no tick counter' };
  }
  return { ok: true, frame: raw as unknown as ServerFrame };
}

export type ClientFrame =
  | { type: 'input'; u: [number, number] }
  | { type: 'toggle' }
  | { type: 'reset' }
  | { type: 'mode'; name: string };

// Client frames echo the newest server tick seen, per the wire contract.
export function encodeClientFrame(frame: ClientFrame, lastTick: number): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, tick: lastTick, ...frame });
}
