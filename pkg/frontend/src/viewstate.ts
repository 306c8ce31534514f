// Single source of truth for rendering: the latest accepted snapshot plus
// connection status. Snapshots are accepted only with a strictly increasing
// tick, so out-of-order frames can never move the picture backwards.

import { Scene, ServerFrame, StateFrame } from './protocol.js';

export type Status = 'connecting' | 'live' | 'ended' | 'closed';

export class ViewState {
  scene: Scene | null = null;
  snapshot: StateFrame | null = null;
  report: Record<string, unknown> | null = null;
  status: Status = 'connecting';
  mode = '';
  spaces = 0;
  deadzone = 0;
  tickRate = 0;
  lastError = '';
  staleDropped = 0;

  // Returns true when the frame changed what should be drawn.
  apply(frame: ServerFrame): boolean {
    switch (frame.type) {
      case 'hello':
        this.scene = frame.scene;
        this.mode = frame.mode;
        this.spaces = frame.spaces;
        this.deadzone = frame.deadzone;
        this.tickRate = frame.tick_rate;
        this.status = 'live';
        return true;
      case 'state': {
        if (this.snapshot !== null && frame.tick <= this.snapshot.tick) {
          this.staleDropped += 1;
          return false;
        }
        this.snapshot = frame;
        this.mode = frame.mode;
        return true;
      }
      case 'bye':
        this.report = frame.report;
        this.status = 'ended';
        return true;
      case 'error':
        this.lastError = frame.error;
        return false;
    }
  }

  disconnected(): void {
    if (this.status !== 'ended') {
      this.status = 'closed';
    }
  }

  availableModes(): string[] {
    const modes: string[] = [];
    for (let i = 0; i < this.spaces; i++) {
      modes.push(`latent:${i}`);
    }
    modes.push('ee:linear', 'ee:rotational');
    return modes;
  }
}
