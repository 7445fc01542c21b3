// Rasterizes a computed Scene onto a 2D canvas.

import { Scene } from "./scene.js";

export function drawScene(
  ctx: CanvasRenderingContext2D,
  scene: Scene,
  width: number,
  height: number,
  showIds: boolean,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#14161a";
  ctx.fillRect(0, 0, width, height);

  if (scene.links.length) {
    ctx.strokeStyle = "rgba(120, 180, 255, 0.25)";
    ctx.lineWidth = 1;
    ctx.beginPath();
    for (const l of scene.links) {
      ctx.moveTo(l.ax, l.ay);
      ctx.lineTo(l.bx, l.by);
    }
    ctx.stroke();
  }

  if (scene.trail.length > 1) {
    ctx.strokeStyle = "rgba(255, 220, 120, 0.6)";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(scene.trail[0][0], scene.trail[0][1]);
    for (const [x, y] of scene.trail) ctx.lineTo(x, y);
    ctx.stroke();
  }

  for (const bot of scene.bots) {
    ctx.beginPath();
    ctx.arc(bot.sx, bot.sy, bot.radiusPx, 0, 2 * Math.PI);
    ctx.fillStyle = bot.color;
    ctx.globalAlpha = bot.lit ? 1.0 : 0.8;
    ctx.fill();
    ctx.globalAlpha = 1.0;
    if (bot.selected) {
      ctx.strokeStyle = "#ffd880";
      ctx.lineWidth = 2;
      ctx.stroke();
    }

    // front leg as a heading stroke, rear legs as black dots
    const [front, rearLeft, rearRight] = bot.legPx;
    if (front) {
      ctx.strokeStyle = "#222";
      ctx.lineWidth = Math.max(1, bot.radiusPx * 0.12);
      ctx.beginPath();
      ctx.moveTo(bot.sx, bot.sy);
      ctx.lineTo(front[0], front[1]);
      ctx.stroke();
    }
    ctx.fillStyle = "#000";
    for (const leg of [rearLeft, rearRight]) {
      if (!leg) continue;
      ctx.beginPath();
      ctx.arc(leg[0], leg[1], Math.max(1, bot.radiusPx * 0.18), 0, 2 * Math.PI);
      ctx.fill();
    }

    if (showIds && bot.radiusPx > 6) {
      ctx.fillStyle = "#eee";
      ctx.font = "10px sans-serif";
      ctx.fillText(String(bot.id), bot.sx + bot.radiusPx + 2, bot.sy - 2);
    }
  }
}
