// Pointer gesture logic, DOM-free: main.ts feeds it pointer coordinates,
// it decides between dragging a robot (emitting move commands) and panning.

import { Camera } from "./camera.js";
import { BODY_RADIUS_MM } from "./scene.js";
import { WireBot } from "./types.js";

export interface DragCallbacks {
  moveBot(id: number, xMm: number, yMm: number): void;
  panned(): void;
}

export const DRAG_THROTTLE_MS = 100;

export function hitTest(
  bots: WireBot[],
  cam: Camera,
  sx: number,
  sy: number,
  width: number,
  height: number,
): number | null {
  const [wx, wy] = cam.screenToWorld(sx, sy, width, height);
  let best: number | null = null;
  let bestD = Infinity;
  for (const b of bots) {
    const d = Math.hypot(b.x_mm - wx, b.y_mm - wy);
    if (d <= BODY_RADIUS_MM && d < bestD) {
      best = b.id;
      bestD = d;
    }
  }
  return best;
}

export class DragGesture {
  private draggingBot: number | null = null;
  private panning = false;
  private lastX = 0;
  private lastY = 0;
  private lastSent = 0;

  constructor(
    private cam: Camera,
    private callbacks: DragCallbacks,
    private now: () => number = () => Date.now(),
  ) {}

  get active(): boolean {
    return this.draggingBot !== null || this.panning;
  }

  get botId(): number | null {
    return this.draggingBot;
  }

  begin(bots: WireBot[], sx: number, sy: number, width: number, height: number, connected: boolean): void {
    this.lastX = sx;
    this.lastY = sy;
    const hit = connected ? hitTest(bots, this.cam, sx, sy, width, height) : null;
    if (hit !== null) {
      this.draggingBot = hit;
    } else {
      this.panning = true;
    }
  }

  move(sx: number, sy: number, width: number, height: number): void {
    if (this.panning) {
      this.cam.panByScreen(sx - this.lastX, sy - this.lastY);
      this.callbacks.panned();
    } else if (this.draggingBot !== null) {
      const t = this.now();
      if (t - this.lastSent >= DRAG_THROTTLE_MS) {
        this.lastSent = t;
        const [wx, wy] = this.cam.screenToWorld(sx, sy, width, height);
        this.callbacks.moveBot(this.draggingBot, wx, wy);
      }
    }
    this.lastX = sx;
    this.lastY = sy;
  }

  end(sx: number, sy: number, width: number, height: number): void {
    if (this.draggingBot !== null) {
      const [wx, wy] = this.cam.screenToWorld(sx, sy, width, height);
      this.callbacks.moveBot(this.draggingBot, wx, wy); // final position always sent
    }
    this.draggingBot = null;
    this.panning = false;
  }

  cancel(): void {
    this.draggingBot = null;
    this.panning = false;
  }
}
