// Joystick-style input from keyboard and an on-screen stick. All DOM event
// plumbing stays outside; this class only sees key codes and stick vectors,
// which keeps it testable headless.

export type ControlEvent =
  | { kind: 'toggle' }
  | { kind: 'reset' }
  | { kind: 'mode'; name: string };

const AXIS_KEYS: Record<string, [number, number]> = {
  ArrowRight: [1, 0],
  KeyD: [1, 0],
  ArrowLeft: [-1, 0],
  KeyA: [-1, 0],
  ArrowUp: [0, 1],
  KeyW: [0, 1],
  ArrowDown: [0, -1],
  KeyS: [0, -1],
};

function clamp(v: number): number {
  return Math.max(-1, Math.min(1, v));
}

export class InputState {
  private held = new Set<string>();
  private stickX = 0;
  private stickY = 0;
  private queue: ControlEvent[] = [];
  private modes: string[] = [];
  private modeIdx = 0;

  setModes(modes: string[], current: string): void {
    this.modes = modes.slice();
    const idx = this.modes.indexOf(current);
    this.modeIdx = idx >= 0 ? idx : 0;
  }

  // repeat=true marks keyboard auto-repeat; discrete actions fire only on
  // the first press (edge-triggered) and re-arm on keyUp.
  keyDown(code: string, repeat = false): void {
    if (repeat || this.held.has(code)) {
      return;
    }
    this.held.add(code);
    if (code === 'Space') {
      this.queue.push({ kind: 'toggle' });
    } else if (code === 'KeyR') {
      this.queue.push({ kind: 'reset' });
    } else if (code === 'KeyM' && this.modes.length > 0) {
      this.modeIdx = (this.modeIdx + 1) % this.modes.length;
      this.queue.push({ kind: 'mode', name: this.modes[this.modeIdx] });
    }
  }

  keyUp(code: string): void {
    this.held.delete(code);
  }

  setStick(x: number, y: number): void {
    this.stickX = clamp(x);
    this.stickY = clamp(y);
  }

  releaseStick(): void {
    this.stickX = 0;
    this.stickY = 0;
  }

  // Combined keyboard + stick vector, each component in [-1, 1].
  sample(): [number, number] {
    let x = this.stickX;
    let y = this.stickY;
    for (const code of this.held) {
      const axis = AXIS_KEYS[code];
      if (axis) {
        x += axis[0];
        y += axis[1];
      }
    }
    return [clamp(x), clamp(y)];
  }

  drainEvents(): ControlEvent[] {
    const out = this.queue;
    this.queue = [];
    return out;
  }
}
