// Connection driver: parses server frames into the ViewState and streams
// input back. One input frame goes out per accepted state frame, so the
// client emits at exactly the server tick rate; discrete events (toggle,
// reset, mode) are sent as they happen.

import { InputState } from './input.js';
import { encodeClientFrame, parseServerFrame } from './protocol.js';
import { ViewState } from './viewstate.js';

export interface Transport {
  send(text: string): void;
}

export class TeleopClient {
  readonly view = new ViewState();
  private transport: Transport | null = null;
  private backlog: string[] = [];
  private lastTick = 0;
  versionError = '';

  constructor(private input: InputState) {}

  attach(transport: Transport): void {
    this.transport = transport;
    const pending = this.backlog;
    this.backlog = [];
    pending.forEach((text) => this.push(text));
  }

  detach(): void {
    this.transport = null;
    this.view.disconnected();
  }

  onMessage(text: string): void {
    const parsed = parseServerFrame(text);
    if (!parsed.ok) {
      // A version mismatch means every frame is suspect: stop talking.
      if (parsed.error.startsWith('protocol version mismatch')) {
        this.versionError = parsed.error;
        this.detach();
      }
      return;
    }
    const frame = parsed.frame;
    this.lastTick = Math.max(this.lastTick, frame.tick);
    const applied = this.view.apply(frame);
    if (frame.type === 'hello') {
      this.input.setModes(this.view.availableModes(), frame.mode);
    }
    if (frame.type === 'state' && applied) {
      this.pump();
    }
  }

  // Sample the stick and flush queued discrete events.
  pump(): void {
    for (const ev of this.input.drainEvents()) {
      if (ev.kind === 'mode') {
        this.push(encodeClientFrame({ type: 'mode', name: ev.name }, this.lastTick));
      } else {
        this.push(encodeClientFrame({ type: ev.kind }, this.lastTick));
      }
    }
    const [x, y] = this.input.sample();
    this.push(encodeClientFrame({ type: 'input', u: [x, y] }, this.lastTick));
  }

  private push(text: string): void {
    if (!this.transport) {
      this.backlog.push(text);
      return;
    }
    try {
      this.transport.send(text);
    } catch {
      this.backlog.push(text); // retried on the next attach
    }
  }

  pendingCount(): number {
    return this.backlog.length;
  }
}
