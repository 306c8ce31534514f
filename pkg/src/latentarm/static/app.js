"use strict";
(() => {
  // src/protocol.ts
  var PROTOCOL_VERSION = 1;
  var SERVER_TYPES = /* @__PURE__ */ new Set(["hello", "state", "bye", "error"]);
  function parseServerFrame(text) {
    let raw;
    try {
      raw = JSON.parse(text);
    } catch {
      return { ok: false, error: "frame is not JSON" };
    }
    if (typeof raw !== "object" || raw === null) {
      return { ok: false, error: "frame is not an object" };
    }
    if (raw["v"] !== PROTOCOL_VERSION) {
      return { ok: false, error: `protocol version mismatch: got ${raw["v"]}` };
    }
    const type = raw["type"];
    if (typeof type !== "string" || !SERVER_TYPES.has(type)) {
      return { ok: false, error: `unknown frame type ${JSON.stringify(type)}` };
    }
    if (typeof raw["tick"] !== "number") {
      return { ok: false, error: "frame carries no tick counter" };
    }
    return { ok: true, frame: raw };
  }
  function encodeClientFrame(frame2, lastTick) {
    return JSON.stringify({ v: PROTOCOL_VERSION, tick: lastTick, ...frame2 });
  }

  // src/viewstate.ts
  var ViewState = class {
    constructor() {
      this.scene = null;
      this.snapshot = null;
      this.report = null;
      this.status = "connecting";
      this.mode = "";
      this.spaces = 0;
      this.deadzone = 0;
      this.tickRate = 0;
      this.lastError = "";
      this.staleDropped = 0;
    }
    // Returns true when the frame changed what should be drawn.
    apply(frame2) {
      switch (frame2.type) {
        case "hello":
          this.scene = frame2.scene;
          this.mode = frame2.mode;
          this.spaces = frame2.spaces;
          this.deadzone = frame2.deadzone;
          this.tickRate = frame2.tick_rate;
          this.status = "live";
          return true;
        case "state": {
          if (this.snapshot !== null && frame2.tick <= this.snapshot.tick) {
            this.staleDropped += 1;
            return false;
          }
          this.snapshot = frame2;
          this.mode = frame2.mode;
          return true;
        }
        case "bye":
          this.report = frame2.report;
          this.status = "ended";
          return true;
        case "error":
          this.lastError = frame2.error;
          return false;
      }
    }
    disconnected() {
      if (this.status !== "ended") {
        this.status = "closed";
      }
    }
    availableModes() {
      const modes = [];
      for (let i = 0; i < this.spaces; i++) {
        modes.push(`latent:${i}`);
      }
      modes.push("ee:linear", "ee:rotational");
      return modes;
    }
  };

  // src/client.ts
  var TeleopClient = class {
    constructor(input2) {
      this.input = input2;
      this.view = new ViewState();
      this.transport = null;
      this.backlog = [];
      this.lastTick = 0;
      this.versionError = "";
    }
    attach(transport) {
      this.transport = transport;
      const pending = this.backlog;
      this.backlog = [];
      pending.forEach((text) => this.push(text));
    }
    detach() {
      this.transport = null;
      this.view.disconnected();
    }
    onMessage(text) {
      const parsed = parseServerFrame(text);
      if (!parsed.ok) {
        if (parsed.error.startsWith("protocol version mismatch")) {
          this.versionError = parsed.error;
          this.detach();
        }
        return;
      }
      const frame2 = parsed.frame;
      this.lastTick = Math.max(this.lastTick, frame2.tick);
      const applied = this.view.apply(frame2);
      if (frame2.type === "hello") {
        this.input.setModes(this.view.availableModes(), frame2.mode);
      }
      if (frame2.type === "state" && applied) {
        this.pump();
      }
    }
    // Sample the stick and flush queued discrete events.
    pump() {
      for (const ev of this.input.drainEvents()) {
        if (ev.kind === "mode") {
          this.push(encodeClientFrame({ type: "mode", name: ev.name }, this.lastTick));
        } else {
          this.push(encodeClientFrame({ type: ev.kind }, this.lastTick));
        }
      }
      const [x, y] = this.input.sample();
      this.push(encodeClientFrame({ type: "input", u: [x, y] }, this.lastTick));
    }
    push(text) {
      if (!this.transport) {
        this.backlog.push(text);
        return;
      }
      try {
        this.transport.send(text);
      } catch {
        this.backlog.push(text);
      }
    }
    pendingCount() {
      return this.backlog.length;
    }
  };

  // src/input.ts
  var AXIS_KEYS = {
    ArrowRight: [1, 0],
    KeyD: [1, 0],
    ArrowLeft: [-1, 0],
    KeyA: [-1, 0],
    ArrowUp: [0, 1],
    KeyW: [0, 1],
    ArrowDown: [0, -1],
    KeyS: [0, -1]
  };
  function clamp(v) {
    return Math.max(-1, Math.min(1, v));
  }
  var InputState = class {
    constructor() {
      this.held = /* @__PURE__ */ new Set();
      this.stickX = 0;
      this.stickY = 0;
      this.queue = [];
      this.modes = [];
      this.modeIdx = 0;
    }
    setModes(modes, current) {
      this.modes = modes.slice();
      const idx = this.modes.indexOf(current);
      this.modeIdx = idx >= 0 ? idx : 0;
    }
    // repeat=true marks keyboard auto-repeat; discrete actions fire only on
    // the first press (edge-triggered) and re-arm on keyUp.
    keyDown(code, repeat = false) {
      if (repeat || this.held.has(code)) {
        return;
      }
      this.held.add(code);
      if (code === "Space") {
        this.queue.push({ kind: "toggle" });
      } else if (code === "KeyR") {
        this.queue.push({ kind: "reset" });
      } else if (code === "KeyM" && this.modes.length > 0) {
        this.modeIdx = (this.modeIdx + 1) % this.modes.length;
        this.queue.push({ kind: "mode", name: this.modes[this.modeIdx] });
      }
    }
    keyUp(code) {
      this.held.delete(code);
    }
    setStick(x, y) {
      this.stickX = clamp(x);
      this.stickY = clamp(y);
    }
    releaseStick() {
      this.stickX = 0;
      this.stickY = 0;
    }
    // Combined keyboard + stick vector, each component in [-1, 1].
    sample() {
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
    drainEvents() {
      const out = this.queue;
      this.queue = [];
      return out;
    }
  };

  // src/scene.ts
  function forwardKinematics(base, links, joints) {
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
  var REGION_COLORS = {
    workspace: "#6a8caf",
    user: "#7fbf7f",
    bin: "#bf8f7f"
  };
  function objectDrawables(spec, snap) {
    const p = spec.params;
    const state = snap ? snap.state : [];
    const held = snap ? snap.held : false;
    switch (spec.kind) {
      case "drawer": {
        const q = state[0] ?? 0;
        const axis = p.axis;
        const handle = [spec.anchor[0] + q * axis[0], spec.anchor[1] + q * axis[1]];
        const end = [
          spec.anchor[0] + p.q_max * axis[0],
          spec.anchor[1] + p.q_max * axis[1]
        ];
        return [
          { shape: "segment", from: spec.anchor, to: end, color: "#555", width: 1 },
          { shape: "disc", center: handle, radius: 0.035, color: "#c96", fill: true, label: spec.name }
        ];
      }
      case "lid": {
        const angle = p.closed_angle + (state[0] ?? 0);
        const pivot = p.pivot;
        const tip = [
          pivot[0] + p.radius * Math.cos(angle),
          pivot[1] + p.radius * Math.sin(angle)
        ];
        return [
          { shape: "disc", center: pivot, radius: 0.02, color: "#888", fill: true },
          { shape: "segment", from: pivot, to: tip, color: "#c96", width: 3 },
          { shape: "disc", center: tip, radius: 0.03, color: "#c96", fill: true, label: spec.name }
        ];
      }
      case "ball":
        return [
          {
            shape: "disc",
            center: state.length >= 2 ? [state[0], state[1]] : spec.anchor,
            radius: p.radius,
            color: "#d9a441",
            fill: true,
            label: spec.name
          }
        ];
      case "cup": {
        const center = state.length >= 2 ? [state[0], state[1]] : spec.anchor;
        const out = [
          {
            shape: "disc",
            center,
            radius: p.radius,
            color: held ? "#4caf50" : "#7a9cc6",
            fill: true,
            label: spec.name
          }
        ];
        if (p.graspable && state.length >= 3) {
          const tilt = state[2];
          out.push({
            shape: "segment",
            from: center,
            to: [
              center[0] + 1.6 * p.radius * Math.cos(tilt + Math.PI / 2),
              center[1] + 1.6 * p.radius * Math.sin(tilt + Math.PI / 2)
            ],
            color: "#333",
            width: 2
          });
        }
        return out;
      }
      case "bin":
        return [
          {
            shape: "rect",
            rect: p.aperture,
            color: "#9575cd",
            fill: true,
            label: spec.name
          }
        ];
      case "fixed-cup-target": {
        const lit = state.length > 0 && state[0] > 0.5;
        return [
          {
            shape: "disc",
            center: spec.anchor,
            radius: p.radius ?? p.proximity_radius,
            color: lit ? "#4caf50" : "#aaa",
            fill: lit,
            label: spec.name
          }
        ];
      }
      default:
        return [];
    }
  }
  function sceneDrawables(scene, snap) {
    const out = [];
    for (const [name, rect] of Object.entries(scene.regions)) {
      out.push({
        shape: "rect",
        rect,
        color: REGION_COLORS[name] ?? "#999",
        fill: false,
        dashed: true,
        label: name
      });
    }
    const byName = /* @__PURE__ */ new Map();
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
      out.push({ shape: "polyline", points: chain, color: "#222", width: 5 });
      for (const pt of chain.slice(0, -1)) {
        out.push({ shape: "disc", center: pt, radius: 0.018, color: "#222", fill: true });
      }
      out.push({
        shape: "disc",
        center: chain[chain.length - 1],
        radius: 0.05,
        color: "#e05252",
        fill: false
      });
    }
    return out;
  }
  function sceneBounds(scene) {
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

  // src/render.ts
  function fmt(v) {
    return v.toFixed(1);
  }
  var Renderer = class {
    constructor(canvas2) {
      this.canvas = canvas2;
      const ctx = canvas2.getContext("2d");
      if (!ctx) {
        throw new Error("canvas 2d context unavailable");
      }
      this.ctx = ctx;
    }
    draw(view, stick) {
      const { ctx, canvas: canvas2 } = this;
      ctx.setTransform(1, 0, 0, 1, 0, 0);
      ctx.fillStyle = "#f5f2ea";
      ctx.fillRect(0, 0, canvas2.width, canvas2.height);
      if (!view.scene) {
        this.banner("connecting...");
        return;
      }
      const [xmin, xmax, ymin, ymax] = sceneBounds(view.scene);
      const scale = Math.min(
        canvas2.width / (xmax - xmin),
        canvas2.height / (ymax - ymin)
      );
      const toX = (x) => (x - xmin) * scale;
      const toY = (y) => canvas2.height - (y - ymin) * scale;
      for (const d of sceneDrawables(view.scene, view.snapshot)) {
        this.drawOne(d, toX, toY, scale);
      }
      this.hud(view, stick);
      if (view.status === "ended") {
        this.banner("task complete - session ended");
      } else if (view.status === "closed") {
        this.banner("disconnected - press reconnect");
      }
    }
    drawOne(d, toX, toY, scale) {
      const ctx = this.ctx;
      ctx.setLineDash(d.shape === "rect" && d.dashed ? [6, 4] : []);
      switch (d.shape) {
        case "polyline": {
          ctx.strokeStyle = d.color;
          ctx.lineWidth = d.width;
          ctx.lineJoin = "round";
          ctx.beginPath();
          d.points.forEach(
            ([x, y], i) => i === 0 ? ctx.moveTo(toX(x), toY(y)) : ctx.lineTo(toX(x), toY(y))
          );
          ctx.stroke();
          break;
        }
        case "segment":
          ctx.strokeStyle = d.color;
          ctx.lineWidth = d.width;
          ctx.beginPath();
          ctx.moveTo(toX(d.from[0]), toY(d.from[1]));
          ctx.lineTo(toX(d.to[0]), toY(d.to[1]));
          ctx.stroke();
          break;
        case "disc":
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
        case "rect": {
          const [rx0, rx1, ry0, ry1] = d.rect;
          const x = toX(rx0);
          const y = toY(ry1);
          const w = (rx1 - rx0) * scale;
          const h = (ry1 - ry0) * scale;
          if (d.fill) {
            ctx.fillStyle = d.color + "55";
            ctx.fillRect(x, y, w, h);
          }
          ctx.strokeStyle = d.color;
          ctx.lineWidth = 1.5;
          ctx.strokeRect(x, y, w, h);
          if (d.label) {
            this.label(d.label, x + 4, y + 12, "left");
          }
          break;
        }
      }
      ctx.setLineDash([]);
    }
    label(text, x, y, align = "center") {
      this.ctx.fillStyle = "#444";
      this.ctx.font = "11px sans-serif";
      this.ctx.textAlign = align;
      this.ctx.fillText(text, x, y);
    }
    hud(view, stick) {
      const ctx = this.ctx;
      const m = view.snapshot?.metrics;
      const lines = [
        `mode ${view.mode}`,
        m ? `total ${fmt(m.total_time)}s  control ${fmt(m.control_time)}s  toggles ${m.toggles}` : "",
        m && m.consistency !== null ? `consistency ${m.consistency.toFixed(2)}` : "",
        `input [${stick[0].toFixed(2)}, ${stick[1].toFixed(2)}]`,
        view.lastError ? `server: ${view.lastError}` : ""
      ].filter((s) => s.length > 0);
      ctx.fillStyle = "#222";
      ctx.font = "13px monospace";
      ctx.textAlign = "left";
      lines.forEach((line, i) => ctx.fillText(line, 10, 18 + 16 * i));
      if (view.snapshot?.flags.ik_fallback) {
        ctx.fillStyle = "#b5651d";
        ctx.fillText("IK near singularity (damped)", 10, 18 + 16 * lines.length);
      }
    }
    banner(text) {
      const ctx = this.ctx;
      ctx.fillStyle = "rgba(30,30,30,0.7)";
      ctx.fillRect(0, this.canvas.height / 2 - 24, this.canvas.width, 48);
      ctx.fillStyle = "#fff";
      ctx.font = "16px sans-serif";
      ctx.textAlign = "center";
      ctx.fillText(text, this.canvas.width / 2, this.canvas.height / 2 + 6);
    }
  };

  // src/main.ts
  var canvas = document.getElementById("scene");
  var stickPad = document.getElementById("stick");
  var knob = document.getElementById("knob");
  var reconnectBtn = document.getElementById("reconnect");
  var input = new InputState();
  var client = new TeleopClient(input);
  var renderer = new Renderer(canvas);
  function connect() {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    const socket = new WebSocket(`${proto}://${location.host}/ws`);
    socket.onopen = () => client.attach(socket);
    socket.onmessage = (ev) => client.onMessage(String(ev.data));
    socket.onclose = () => client.detach();
    socket.onerror = () => socket.close();
  }
  window.addEventListener("keydown", (e) => {
    if (e.code === "Space") {
      e.preventDefault();
    }
    input.keyDown(e.code, e.repeat);
  });
  window.addEventListener("keyup", (e) => input.keyUp(e.code));
  var pointerId = null;
  function stickVector(e) {
    const rect = stickPad.getBoundingClientRect();
    const cx = rect.left + rect.width / 2;
    const cy = rect.top + rect.height / 2;
    const r = rect.width / 2;
    return [(e.clientX - cx) / r, (cy - e.clientY) / r];
  }
  stickPad.addEventListener("pointerdown", (e) => {
    pointerId = e.pointerId;
    stickPad.setPointerCapture(pointerId);
    const [x, y] = stickVector(e);
    input.setStick(x, y);
  });
  stickPad.addEventListener("pointermove", (e) => {
    if (e.pointerId === pointerId) {
      const [x, y] = stickVector(e);
      input.setStick(x, y);
    }
  });
  function release(e) {
    if (e.pointerId === pointerId) {
      pointerId = null;
      input.releaseStick();
    }
  }
  stickPad.addEventListener("pointerup", release);
  stickPad.addEventListener("pointercancel", release);
  reconnectBtn.addEventListener("click", () => {
    if (client.view.status !== "live") {
      connect();
    }
  });
  function frame() {
    const [x, y] = input.sample();
    renderer.draw(client.view, [x, y]);
    const k = stickPad.getBoundingClientRect().width / 2;
    knob.style.transform = `translate(${x * k * 0.6}px, ${-y * k * 0.6}px)`;
    requestAnimationFrame(frame);
  }
  connect();
  requestAnimationFrame(frame);
})();
