// Canvas renderer. Everything drawn comes from the latest snapshot in the
// ViewState; there is no client-side prediction, so the picture is exactly
// what the server measured.

import { sceneBounds, sceneDrawables, Drawable } from './scene.js';
import { ViewState } from './viewstate.js';

function fmt(v: number): string {
  return v.toFixed(1);
}

export class Renderer {
  private ctx: CanvasRenderingContext2D;

  constructor(private canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext('2d');
    if (!ctx) {
      throw new Error('canvas 2d context unavailable');
    }
    this.ctx = ctx;
  }

  draw(view: ViewState, stick: [number, number]): void {
    const { ctx, canvas } = this;
    ctx.setTransform(1, 0, 0, 1, 0, 0);
    ctx.fillStyle = '#f5f2ea';
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (!view.scene) {
      this.banner('connecting...');
      return;
    }

    const [xmin, xmax, ymin, ymax] = sceneBounds(view.scene);
    const scale = Math.min(
      canvas.width / (xmax - xmin),
      canvas.height / (ymax - ymin),
    );
    // y flipped: world y up, canvas y down
    const toX = (x: number) => (x - xmin) * scale;
    const toY = (y: number) => canvas.height - (y - ymin) * scale;

    for (const d of sceneDrawables(view.scene, view.snapshot)) {
      this.drawOne(d, toX, toY, scale);
    }
    this.hud(view, stick);
    if (view.status === 'ended') {
      this.banner('task complete - session ended');
    } else if (view.status === 'closed') {
      this.banner('disconnected - press reconnect');
    }
  }

  private drawOne(
    d: Drawable,
    toX: (x: number) => number,
    toY: (y: number) => number,
    scale: number,
  ): void {
    const ctx = this.ctx;
    ctx.setLineDash(d.shape === 'rect' && d.dashed ? [6, 4] : []);
    switch (d.shape) {
      case 'polyline': {
        ctx.strokeStyle = d.color;
        ctx.lineWidth = d.width;
        ctx.lineJoin = 'round';
        ctx.beginPath();
        d.points.forEach(([x, y], i) =>
          i === 0 ? ctx.moveTo(toX(x), toY(y)) : ctx.lineTo(toX(x), toY(y)),
        );
        ctx.stroke();
        break;
      }
      case 'segment':
        ctx.strokeStyle = d.color;
        ctx.lineWidth = d.width;
        ctx.beginPath();
        ctx.moveTo(toX(d.from[0]), toY(d.from[1]));
        ctx.lineTo(toX(d.to[0]), toY(d.to[1]));
        ctx.stroke();
        break;
      case 'disc':
        ctx.beginPath();
        ctx.arc(toX(d.center[0]), toY(d.center[1]), d.radius * scale, 0, 2 * Math.PI);
        if (d.fill) {
          ctx.fillStyle = d.color;
          ctx.fill();
        } else {
          ctx.strokeStyle = d.color;
          ctx.lineWidth = 2;
          ctx.stroke();
        }
        if (d.label) {
          this.label(d.label, toX(d.center[0]), toY(d.center[1]) - d.radius * scale - 4);
        }
        break;
      case 'rect': {
        const [rx0, rx1, ry0, ry1] = d.rect;
        const x = toX(rx0);
        const y = toY(ry1);
        const w = (rx1 - rx0) * scale;
        const h = (ry1 - ry0) * scale;
        if (d.fill) {
          ctx.fillStyle = d.color + '55';
          ctx.fillRect(x, y, w, h);
        }
        ctx.strokeStyle = d.color;
        ctx.lineWidth = 1.5;
        ctx.strokeRect(x, y, w, h);
        if (d.label) {
          this.label(d.label, x + 4, y + 12, 'left');
        }
        break;
      }
    }
    ctx.setLineDash([]);
  }

  private label(text: string, x: number, y: number, align: CanvasTextAlign = 'center'): void {
    this.ctx.fillStyle = '#444';
    this.ctx.font = '11px sans-serif';
    this.ctx.textAlign = align;
    this.ctx.fillText(text, x, y);
  }

  private hud(view: ViewState, stick: [number, number]): void {
    const ctx = this.ctx;
    const m = view.snapshot?.metrics;
    const lines = [
      `mode ${view.mode}`,
      m
        ? `total ${fmt(m.total_time)}s  control ${fmt(m.control_time)}s  toggles ${m.toggles}`
        : '',
      m && m.consistency !== null ? `consistency ${m.consistency.toFixed(2)}` : '',
      `input [${stick[0].toFixed(2)}, ${stick[1].toFixed(2)}]`,
      view.lastError ? `server: ${view.lastError}` : '',
    ].filter((s) => s.length > 0);
    ctx.fillStyle = '#222';
    ctx.font = '13px monospace';
    ctx.textAlign = 'left';
    lines.forEach((line, i) => ctx.fillText(line, 10, 18 + 16 * i));
    if (view.snapshot?.flags.ik_fallback) {
      ctx.fillStyle = '#b5651d';
      ctx.fillText('IK near singularity (damped)', 10, 18 + 16 * lines.length);
    }
  }

  private banner(text: string): void {
    const ctx = this.ctx;
    ctx.fillStyle = 'rgba(30,30,30,0.7)';
    ctx.fillRect(0, this.canvas.height / 2 - 24, this.canvas.width, 48);
    ctx.fillStyle = '#fff';
    ctx.font = '16px sans-serif';
    ctx.textAlign = 'center';
    ctx.fillText(text, this.canvas.width / 2, this.canvas.height / 2 + 6);
  }
}
