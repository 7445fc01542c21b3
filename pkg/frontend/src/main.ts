// Entry point: wires the connection, camera, controls and render loop.

import { Camera } from "./camera.js";
import { Connection } from "./connection.js";
import { DragGesture, hitTest } from "./drag.js";
import { drawScene } from "./renderer.js";
import { computeScene } from "./scene.js";
import { TrailStore } from "./trails.js";
import { WireSnapshot } from "./types.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const tickEl = document.getElementById("tick")!;
const pauseBtn = document.getElementById("pause") as HTMLButtonElement;
const speedSlider = document.getElementById("speed") as HTMLInputElement;
const speedLabel = document.getElementById("speed-label")!;
const linksToggle = document.getElementById("links") as HTMLInputElement;
const idsToggle = document.getElementById("ids") as HTMLInputElement;
const trailsToggle = document.getElementById("trails") as HTMLInputElement;
const toastEl = document.getElementById("toast")!;

const cam = new Camera();
const trails = new TrailStore();
let latest: WireSnapshot | null = null;
let selection: number | null = null;
let fitted = false;
let toastTimer = 0;

function toast(message: string): void {
  toastEl.textContent = message;
  toastEl.classList.add("visible");
  window.clearTimeout(toastTimer);
  toastTimer = window.setTimeout(() => toastEl.classList.remove("visible"), 3000);
}

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const conn = new Connection(wsUrl, {
  onSnapshot(snap) {
    latest = snap;
    if (!fitted && snap.bots.length) {
      cam.fitTo(snap.bots.map((b) => [b.x_mm, b.y_mm]), canvas.width, canvas.height);
      fitted = true;
    }
    if (trailsToggle.checked && selection !== null) {
      const bot = snap.bots.find((b) => b.id === selection);
      if (bot) trails.record(selection, snap.tick, bot.x_mm, bot.y_mm);
    }
    pauseBtn.textContent = snap.paused ? "Resume" : "Pause";
    tickEl.textContent = `tick ${snap.tick} · t=${snap.sim_time_s.toFixed(1)}s · ${snap.bots.length} bots`;
  },
  onStatus(connected) {
    statusEl.textContent = connected ? "connected" : "disconnected";
    statusEl.className = connected ? "ok" : "bad";
    if (!connected) {
      selection = null; // selection cleared on disconnect
      trails.clear();
    }
  },
  onError(reason) {
    toast(`rejected: ${reason}`);
  },
});

// ---- controls ------------------------------------------------------------

pauseBtn.addEventListener("click", () => {
  if (!latest) return;
  conn.send({ type: latest.paused ? "resume" : "pause" });
});

speedSlider.addEventListener("change", () => {
  // slider is log-scaled over 0.1x .. 100x
  const factor = Math.pow(10, parseFloat(speedSlider.value));
  speedLabel.textContent = `${factor.toFixed(factor < 1 ? 2 : 1)}x`;
  conn.send({ type: "set_speed", factor });
});

linksToggle.addEventListener("change", () => {
  conn.send({ type: "toggle_comms_overlay" });
});

// ---- pointer handling ----------------------------------------------------

const gesture = new DragGesture(cam, {
  moveBot(id, x, y) {
    conn.send({ type: "move_bot", id, x_mm: x, y_mm: y });
  },
  panned() {},
});

canvas.addEventListener("pointerdown", (ev) => {
  canvas.setPointerCapture(ev.pointerId);
  const bots = latest ? latest.bots : [];
  const hit = hitTest(bots, cam, ev.offsetX, ev.offsetY, canvas.width, canvas.height);
  if (hit !== null) selection = hit;
  gesture.begin(bots, ev.offsetX, ev.offsetY, canvas.width, canvas.height, conn.connected);
});
canvas.addEventListener("pointermove", (ev) => {
  if (gesture.active) gesture.move(ev.offsetX, ev.offsetY, canvas.width, canvas.height);
});
canvas.addEventListener("pointerup", (ev) => {
  if (gesture.active) gesture.end(ev.offsetX, ev.offsetY, canvas.width, canvas.height);
});
canvas.addEventListener("pointercancel", () => gesture.cancel());
canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  cam.zoomAt(ev.offsetX, ev.offsetY, ev.deltaY < 0 ? 1.15 : 1 / 1.15, canvas.width, canvas.height);
}, { passive: false });

// ---- render loop ----------------------------------------------------------

function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
}
window.addEventListener("resize", resize);
resize();

function frame(): void {
  if (latest) {
    const scene = computeScene(latest, cam, canvas.width, canvas.height, {
      showLinks: linksToggle.checked,
      showIds: idsToggle.checked,
      selection,
      trailWorld: trailsToggle.checked ? trails.get() : [],
    });
    drawScene(ctx, scene, canvas.width, canvas.height, idsToggle.checked);
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
