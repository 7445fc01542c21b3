// Pure scene computation: what to draw for a snapshot under a camera.
// Keeping this free of canvas calls makes it unit-testable; the renderer
// only rasterizes the result.

import { Camera } from "./camera.js";
import { WireBot, WireSnapshot } from "./types.js";

export const BODY_RADIUS_MM = 16.5;

export interface SceneBot {
  id: number;
  sx: number;
  sy: number;
  radiusPx: number;
  color: string;
  lit: boolean;
  legPx: [number, number][];
  selected: boolean;
}

export interface SceneLink {
  ax: number;
  ay: number;
  bx: number;
  by: number;
}

export interface Scene {
  bots: SceneBot[];
  links: SceneLink[];
  trail: [number, number][]; // screen-space polyline for the selection
  culled: number;
}

export interface SceneOptions {
  showLinks: boolean;
  showIds: boolean;
  selection: number | null;
  trailWorld: [number, number][];
}

/** "r,g,b" with 2-bit components -> CSS color; unlit LEDs render gray. */
export function ledToColor(led: string): { color: string; lit: boolean } {
  const parts = led.split(",").map((v) => parseInt(v, 10));
  if (parts.length !== 3 || parts.some((v) => Number.isNaN(v))) {
    return { color: "#888", lit: false };
  }
  const [r, g, b] = parts.map((v) => Math.min(3, Math.max(0, v)) * 85);
  if (r === 0 && g === 0 && b === 0) return { color: "#a0a0a0", lit: false };
  return { color: `rgb(${r},${g},${b})`, lit: true };
}

/** Undirected links between robots within the communication radius. */
export function commLinks(bots: WireBot[], radiusMm: number): [number, number][] {
  // bucket by cell = radius so only 3x3 neighborhoods need checking
  const cell = Math.max(radiusMm, 1);
  const buckets = new Map<string, number[]>();
  bots.forEach((b, k) => {
    const key = `${Math.floor(b.x_mm / cell)},${Math.floor(b.y_mm / cell)}`;
    const list = buckets.get(key);
    if (list) list.push(k);
    else buckets.set(key, [k]);
  });
  const out: [number, number][] = [];
  const r2 = radiusMm * radiusMm;
  bots.forEach((b, k) => {
    const cx = Math.floor(b.x_mm / cell);
    const cy = Math.floor(b.y_mm / cell);
    for (let dx = -1; dx <= 1; dx++) {
      for (let dy = -1; dy <= 1; dy++) {
        const list = buckets.get(`${cx + dx},${cy + dy}`);
        if (!list) continue;
        for (const m of list) {
          if (m <= k) continue;
          const o = bots[m];
          const ddx = o.x_mm - b.x_mm;
          const ddy = o.y_mm - b.y_mm;
          if (ddx * ddx + ddy * ddy <= r2) out.push([k, m]);
        }
      }
    }
  });
  return out;
}

export function computeScene(
  snap: WireSnapshot,
  cam: Camera,
  width: number,
  height: number,
  opts: SceneOptions,
): Scene {
  const radiusPx = BODY_RADIUS_MM * cam.zoom;
  const bots: SceneBot[] = [];
  const visible = new Map<number, SceneBot>(); // index in snap.bots -> scene bot
  let culled = 0;
  snap.bots.forEach((b, k) => {
    const [sx, sy] = cam.worldToScreen(b.x_mm, b.y_mm, width, height);
    if (sx < -radiusPx || sx > width + radiusPx || sy < -radiusPx || sy > height + radiusPx) {
      culled += 1;
      return;
    }
    const { color, lit } = ledToColor(b.led);
    const sceneBot: SceneBot = {
      id: b.id,
      sx,
      sy,
      radiusPx,
      color,
      lit,
      legPx: b.leg_points.map(([x, y]) => cam.worldToScreen(x, y, width, height)),
      selected: b.id === opts.selection,
    };
    bots.push(sceneBot);
    visible.set(k, sceneBot);
  });

  const links: SceneLink[] = [];
  if (opts.showLinks) {
    for (const [a, b] of commLinks(snap.bots, snap.comm_radius_mm)) {
      const sa = visible.get(a);
      const sb = visible.get(b);
      if (sa && sb) links.push({ ax: sa.sx, ay: sa.sy, bx: sb.sx, by: sb.sy });
    }
  }

  const trail = opts.trailWorld.map(([x, y]) => cam.worldToScreen(x, y, width, height));
  return { bots, links, trail, culled };
}
