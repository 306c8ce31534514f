import { describe, expect, it } from 'vitest';
import { TeleopClient } from '../src/client.js';
import { InputState } from '../src/input.js';
import { PROTOCOL_VERSION } from '../src/protocol.js';

function stateText(tick: number): string {
  return JSON.stringify({
    v: PROTOCOL_VERSION,
    type: 'state',
    tick,
    joints: [0, 0, 0],
    ee: [0.9, 0, 0],
    objects: [],
    mode: 'ee:linear',
    metrics: {
      total_time: 0,
      control_time: 0,
      consistency: null,
      toggles: 0,
      complete: false,
    },
    flags: { input_reused: false, ik_fallback: false },
    events: [],
  });
}

class MockServer {
  sent: Record<string, unknown>[] = [];
  failing = false;

  send(text: string): void {
    if (this.failing) {
      throw new Error('socket closed');
    }
    this.sent.push(JSON.parse(text));
  }
}

describe('TeleopClient', () => {
  it('emits one bounded input frame per accepted state frame', () => {
    const input = new InputState();
    const client = new TeleopClient(input);
    const server = new MockServer();
    client.attach(server);
    input.setStick(3, -7); // clamped by the input layer
    client.onMessage(stateText(1));
    client.onMessage(stateText(2));
    const inputs = server.sent.filter((m) => m.type === 'input');
    expect(inputs).toHaveLength(2);
    for (const frame of inputs) {
      const [x, y] = frame.u as [number, number];
      expect(Math.abs(x)).toBeLessThanOrEqual(1);
      expect(Math.abs(y)).toBeLessThanOrEqual(1);
      expect(frame.v).toBe(PROTOCOL_VERSION);
    }
  });

  it('does not emit for stale snapshots', () => {
    const client = new TeleopClient(new InputState());
    const server = new MockServer();
    client.attach(server);
    client.onMessage(stateText(5));
    client.onMessage(stateText(4)); // out of order
    expect(server.sent.filter((m) => m.type === 'input')).toHaveLength(1);
  });

  it('sends an edge-triggered toggle exactly once', () => {
    const input = new InputState();
    const client = new TeleopClient(input);
    const server = new MockServer();
    client.attach(server);
    input.keyDown('Space');
    input.keyDown('Space', true);
    client.onMessage(stateText(1));
    client.onMessage(stateText(2));
    expect(server.sent.filter((m) => m.type === 'toggle')).toHaveLength(1);
  });

  it('buffers failed sends and retries on reattach', () => {
    const input = new InputState();
    const client = new TeleopClient(input);
    const server = new MockServer();
    server.failing = true;
    client.attach(server);
    client.onMessage(stateText(1));
    expect(server.sent).toHaveLength(0);
    expect(client.pendingCount()).toBeGreaterThan(0);
    const fresh = new MockServer();
    client.attach(fresh);
    expect(fresh.sent.length).toBeGreaterThan(0);
    expect(client.pendingCount()).toBe(0);
  });

  it('disconnects on protocol version mismatch', () => {
    const client = new TeleopClient(new InputState());
    const server = new MockServer();
    client.attach(server);
    client.onMessage(JSON.stringify({ v: 2, type: 'state', tick: 1 }));
    expect(client.versionError).toContain('version mismatch');
    expect(client.view.status).toBe('closed');
  });
});
