import { describe, expect, it } from 'vitest';
import { StateFrame } from '../src/protocol.js';
import { ViewState } from '../src/viewstate.js';

function state(tick: number, joints: number[] = [0, 0, 0]): StateFrame {
  return {
    type: 'state',
    tick,
    joints,
    ee: [0.9, 0, 0],
    objects: [],
    mode: 'ee:linear',
    metrics: {
      total_time: tick / 20,
      control_time: 0,
      consistency: null,
      toggles: 0,
      complete: false,
    },
    flags: { input_reused: false, ik_fallback: false },
    events: [],
  };
}

describe('ViewState', () => {
  it('keeps only the newest snapshot by tick', () => {
    const view = new ViewState();
    expect(view.apply(state(5))).toBe(true);
    expect(view.apply(state(6, [1, 1, 1]))).toBe(true);
    expect(view.snapshot?.joints).toEqual([1, 1, 1]);
  });

  it('discards out-of-order snapshots without changing the frame', () => {
    const view = new ViewState();
    view.apply(state(6, [1, 1, 1]));
    expect(view.apply(state(5, [9, 9, 9]))).toBe(false);
    expect(view.apply(state(6, [8, 8, 8]))).toBe(false);
    expect(view.snapshot?.joints).toEqual([1, 1, 1]);
    expect(view.staleDropped).toBe(2);
  });

  it('goes live on hello and ended on bye', () => {
    const view = new ViewState();
    expect(view.status).toBe('connecting');
    view.apply({
      type: 'hello',
      tick: 0,
      protocol: 1,
      scene: {
        env: 'opening',
        links: [0.4, 0.3, 0.2],
        base: [0, 0],
        horizon: 200,
        latent_dim: 1,
        latent_spaces: 1,
        objects: [],
        regions: {},
      },
      tick_rate: 20,
      deadzone: 0.05,
      mode: 'latent:0',
      spaces: 1,
    });
    expect(view.status).toBe('live');
    expect(view.availableModes()).toEqual(['latent:0', 'ee:linear', 'ee:rotational']);
    view.apply({ type: 'bye', tick: 10, report: { ticks: 10 } });
    expect(view.status).toBe('ended');
    expect(view.report).toEqual({ ticks: 10 });
  });

  it('records server errors without touching the snapshot', () => {
    const view = new ViewState();
    view.apply(state(2));
    expect(view.apply({ type: 'error', tick: 2, error: 'nope' })).toBe(false);
    expect(view.lastError).toBe('nope');
    expect(view.snapshot?.tick).toBe(2);
  });
});
