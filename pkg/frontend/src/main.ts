// Browser bootstrap: canvas, keyboard, on-screen stick, WebSocket.

import { TeleopClient } from './client.js';
import { InputState } from './input.js';
import { Renderer } from './render.js';

const canvas = document.getElementById('scene') as HTMLCanvasElement;
const stickPad = document.getElementById('stick') as HTMLDivElement;
const knob = document.getElementById('knob') as HTMLDivElement;
const reconnectBtn = document.getElementById('reconnect') as HTMLButtonElement;

const input = new InputState();
const client = new TeleopClient(input);
const renderer = new Renderer(canvas);

function connect(): void {
  const proto = location.protocol === 'https:' ? 'wss' : 'ws';
  const socket = new WebSocket(`${proto}://${location.host}/ws`);
  socket.onopen = () => client.attach(socket);
  socket.onmessage = (ev: MessageEvent) => client.onMessage(String(ev.data));
  socket.onclose = () => client.detach();
  socket.onerror = () => socket.close();
}

window.addEventListener('keydown', (e) => {
  if (e.code === 'Space') {
    e.preventDefault(); // keep the page from scrolling
  }
  input.keyDown(e.code, e.repeat);
});
window.addEventListener('keyup', (e) => input.keyUp(e.code));

// On-screen stick: pointer offset from the pad center, normalized to [-1,1].
let pointerId: number | null = null;

function stickVector(e: PointerEvent): [number, number] {
  const rect = stickPad.getBoundingClientRect();
  const cx = rect.left + rect.width / 2;
  const cy = rect.top + rect.height / 2;
  const r = rect.width / 2;
  // screen y grows downward; world y grows upward
  return [(e.clientX - cx) / r, (cy - e.clientY) / r];
}

stickPad.addEventListener('pointerdown', (e) => {
  pointerId = e.pointerId;
  stickPad.setPointerCapture(pointerId);
  const [x, y] = stickVector(e);
  input.setStick(x, y);
});
stickPad.addEventListener('pointermove', (e) => {
  if (e.pointerId === pointerId) {
    const [x, y] = stickVector(e);
    input.setStick(x, y);
  }
});
function release(e: PointerEvent): void {
  if (e.pointerId === pointerId) {
    pointerId = null;
    input.releaseStick();
  }
}
stickPad.addEventListener('pointerup', release);
stickPad.addEventListener('pointercancel', release);

reconnectBtn.addEventListener('click', () => {
  if (client.view.status !== 'live') {
    connect();
  }
});

function frame(): void {
  const [x, y] = input.sample();
  renderer.draw(client.view, [x, y]);
  const k = stickPad.getBoundingClientRect().width / 2;
  knob.style.transform = `translate(${x * k * 0.6}px, ${-y * k * 0.6}px)`;
  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);
