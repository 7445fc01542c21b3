// World (mm, y up) <-> screen (px, y down) transforms with pan and zoom.

export class Camera {
  centerX = 0; // world mm at the canvas centre
  centerY = 0;
  zoom = 2; // px per mm

  worldToScreen(x: number, y: number, width: number, height: number): [number, number] {
    return [
      width / 2 + (x - this.centerX) * this.zoom,
      height / 2 - (y - this.centerY) * this.zoom,
    ];
  }

  screenToWorld(sx: number, sy: number, width: number, height: number): [number, number] {
    return [
      this.centerX + (sx - width / 2) / this.zoom,
      this.centerY - (sy - height / 2) / this.zoom,
    ];
  }

  panByScreen(dxPx: number, dyPx: number): void {
    this.centerX -= dxPx / this.zoom;
    this.centerY += dyPx / this.zoom;
  }

  /** Zoom by a factor keeping the world point under (sx, sy) fixed. */
  zoomAt(sx: number, sy: number, factor: number, width: number, height: number): void {
    const [wx, wy] = this.screenToWorld(sx, sy, width, height);
    this.zoom = Math.min(50, Math.max(0.02, this.zoom * factor));
    // re-anchor so (wx, wy) stays under the cursor
    this.centerX = wx - (sx - width / 2) / this.zoom;
    this.centerY = wy + (sy - height / 2) / this.zoom;
  }

  /** Frame the given world points with a margin. */
  fitTo(points: [number, number][], width: number, height: number, marginPx = 40): void {
    if (points.length === 0) return;
    let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
    for (const [x, y] of points) {
      minX = Math.min(minX, x); maxX = Math.max(maxX, x);
      minY = Math.min(minY, y); maxY = Math.max(maxY, y);
    }
    this.centerX = (minX + maxX) / 2;
    this.centerY = (minY + maxY) / 2;
    const spanX = Math.max(maxX - minX, 1);
    const spanY = Math.max(maxY - minY, 1);
    this.zoom = Math.min(
      (width - 2 * marginPx) / spanX,
      (height - 2 * marginPx) / spanY,
      50,
    );
    if (!isFinite(this.zoom) || this.zoom <= 0) this.zoom = 1;
  }
}
