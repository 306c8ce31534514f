import { describe, expect, it } from 'vitest';
import {
  PROTOCOL_VERSION,
  encodeClientFrame,
  parseServerFrame,
} from '../src/protocol.js';

const stateFrame = {
  v: PROTOCOL_VERSION,
  type: 'state',
  tick: 3,
  joints: [0, 0, 0],
  ee: [0.9, 0, 0],
  objects: [],
  mode: 'ee:linear',
  metrics: {
    total_time: 0.15,
    control_time: 0.1,
    consistency: null,
    toggles: 0,
    complete: false,
  },
  flags: { input_reused: false, ik_fallback: false },
  events: [],
};

describe('parseServerFrame', () => {
  it('accepts a well-formed state frame', () => {
    const res = parseServerFrame(JSON.stringify(stateFrame));
    expect(res.ok).toBe(true);
    if (res.ok) {
      expect(res.frame.type).toBe('state');
      expect(res.frame.tick).toBe(3);
    }
  });

  it('rejects a version mismatch', () => {
    const res = parseServerFrame(JSON.stringify({ ...stateFrame, v: 99 }));
    expect(res.ok).toBe(false);
    if (!res.ok) {
      expect(res.error).toContain('version mismatch');
    }
  });

  it('rejects unknown frame types', () => {
    const res = parseServerFrame(
      JSON.stringify({ v: PROTOCOL_VERSION, type: 'teleport', tick: 1 }),
    );
    expect(res.ok).toBe(false);
  });

  it('rejects frames without a tick counter', () => {
    const res = parseServerFrame(
      JSON.stringify({ v: PROTOCOL_VERSION, type: 'state' }),
    );
    expect(res.ok).toBe(false);
  });

  it('rejects non-JSON input', () => {
    expect(parseServerFrame('not json').ok).toBe(false);
  });
});

describe('encodeClientFrame', () => {
  it('stamps version and the echoed tick', () => {
    const text = encodeClientFrame({ type: 'input', u: [0.5, -1] }, 42);
    const obj = JSON.parse(text);
    expect(obj.v).toBe(PROTOCOL_VERSION);
    expect(obj.tick).toBe(42);
    expect(obj.u).toEqual([0.5, -1]);
  });
});
