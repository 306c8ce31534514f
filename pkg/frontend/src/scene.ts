// Pure scene geometry: world-space drawables computed from the static scene
// plus the latest snapshot. Rendering (canvas, colors as pixels) lives in
// render.ts; keeping this file DOM-free lets tests check the geometry.

import { ObjectSnapshot, Scene, StateFrame } from './protocol.js';

export type Drawable =
  | { shape: 'polyline'; points: number[][]; color: string; width: number }
  | {
      shape: 'disc';
      center: number[];
      radius: number;
      color: string;
      fill: boolean;
      label?: string;
    }
  | { shape: 'rect'; rect: number[]; color: string; fill: boolean; dashed?: boolean; label?: string }
  | { shape: 'segment'; from: number[]; to: number[]; color: string; width: number };

// Joint positions for a planar chain: base, then each link tip, with joint
// angles accumulating along the chain. Must agree with the server's own
// forward kinematics or the picture lies about the metrics.
export function forwardKinematics(
  base: number[],
  links: number[],
  joints: number[],
): number[][] {
  const points = [[base[0], base[1]]];
  let angle = 0;
  let x = base[0];
  let y = base[1];
  for (let i = 0; i < links.length; i++) {
    angle += joints[i];
    x += links[i] * Math.cos(angle);
    y += links[i] * Math.sin(angle);
    points.push([x, y]);
  }
  return points;
}

const REGION_COLORS: Record<string, string> = {
  workspace: '#6a8caf',
  user: '#7fbf7f',
  bin: '#bf8f7f',
};

function objectDrawables(
  spec: Scene['objects'][number],
  snap: ObjectSnapshot | undefined,
): Drawable[] {
  const p = spec.params as Record<string, any>;
  const state = snap ? snap.state : [];
  const held = snap ? snap.held : false;
  switch (spec.kind) {
    case 'drawer': {
      const q = state[0] ?? 0;
      const axis = p.axis as number[];
      const handle = [spec.anchor[0] + q * axis[0], spec.anchor[1] + q * axis[1]];
      const end = [
        spec.anchor[0] + p.q_max * axis[0],
        spec.anchor[1] + p.q_max * axis[1],
      ];
      return [
        { shape: 'segment', from: spec.anchor, to: end, color: '#555', width: 1 },
        { shape: 'disc', center: handle, radius: 0.035, color: '#c96', fill: true, label: spec.name },
      ];
    }
    case 'lid': {
      const angle = (p.closed_angle as number) + (state[0] ?? 0);
      const pivot = p.pivot as number[];
      const tip = [
        pivot[0] + p.radius * Math.cos(angle),
        pivot[1] + p.radius * Math.sin(angle),
      ];
      return [
        { shape: 'disc', center: pivot, radius: 0.02, color: '#888', fill: true },
        { shape: 'segment', from: pivot, to: tip, color: '#c96', width: 3 },
        { shape: 'disc', center: tip, radius: 0.03, color: '#c96', fill: true, label: spec.name },
      ];
    }
    case 'ball':
      return [
        {
          shape: 'disc',
          center: state.length >= 2 ? [state[0], state[1]] : spec.anchor,
          radius: p.radius,
          color: '#d9a441',
          fill: true,
          label: spec.name,
        },
      ];
    case 'cup': {
      const center = state.length >= 2 ? [state[0], state[1]] : spec.anchor;
      const out: Drawable[] = [
        {
          shape: 'disc',
          center,
          radius: p.radius,
          color: held ? '#4caf50' : '#7a9cc6',
          fill: true,
          label: spec.name,
        },
      ];
      if (p.graspable && state.length >= 3) {
        // short tick showing the cup tilt
        const tilt = state[2];
        out.push({
          shape: 'segment',
          from: center,
          to: [
            center[0] + 1.6 * p.radius * Math.cos(tilt + Math.PI / 2),
            center[1] + 1.6 * p.radius * Math.sin(tilt + Math.PI / 2),
          ],
          color: '#333',
          width: 2,
        });
      }
      return out;
    }
    case 'bin':
      return [
        {
          shape: 'rect',
          rect: p.aperture as number[],
          color: '#9575cd',
          fill: true,
          label: spec.name,
        },
      ];
    case 'fixed-cup-target': {
      const lit = state.length > 0 && state[0] > 0.5;
      return [
        {
          shape: 'disc',
          center: spec.anchor,
          radius: p.radius ?? p.proximity_radius,
          color: lit ? '#4caf50' : '#aaa',
          fill: lit,
          label: spec.name,
        },
      ];
    }
    default:
      return [];
  }
}

export function sceneDrawables(scene: Scene, snap: StateFrame | null): Drawable[] {
  const out: Drawable[] = [];
  for (const [name, rect] of Object.entries(scene.regions)) {
    out.push({
      shape: 'rect',
      rect,
      color: REGION_COLORS[name] ?? '#999',
      fill: false,
      dashed: true,
      label: name,
    });
  }
  const byName = new Map<string, ObjectSnapshot>();
  if (snap) {
    for (const obj of snap.objects) {
      byName.set(obj.name, obj);
    }
  }
  for (const spec of scene.objects) {
    out.push(...objectDrawables(spec, byName.get(spec.name)));
  }
  if (snap) {
    const chain = forwardKinematics(scene.base, scene.links, snap.joints);
    out.push({ shape: 'polyline', points: chain, color: '#222', width: 5 });
    for (const pt of chain.slice(0, -1)) {
      out.push({ shape: 'disc', center: pt, radius: 0.018, color: '#222', fill: true });
    }
    out.push({
      shape: 'disc',
      center: chain[chain.length - 1],
      radius: 0.05,
      color: '#e05252',
      fill: false,
    });
  }
  return out;
}

// World-space bounding box the renderer should fit on screen.
export function sceneBounds(scene: Scene): number[] {
  const reach = scene.links.reduce((a, b) => a + b, 0);
  let [xmin, xmax] = [scene.base[0] - reach, scene.base[0] + reach];
  let [ymin, ymax] = [scene.base[1] - reach, scene.base[1] + reach];
  for (const rect of Object.values(scene.regions)) {
    xmin = Math.min(xmin, rect[0]);
    xmax = Math.max(xmax, rect[1]);
    ymin = Math.min(ymin, rect[2]);
    ymax = Math.max(ymax, rect[3]);
  }
  const pad = 0.08;
  return [xmin - pad, xmax + pad, ymin - pad, ymax + pad];
}
