// Recent positions of the selected robot, capped at 500 points.

export const TRAIL_CAP = 500;

export class TrailStore {
  private points: [number, number][] = [];
  private trackedId: number | null = null;
  private lastTick = -1;

  record(id: number | null, tick: number, x: number, y: number): void {
    if (id !== this.trackedId) {
      this.trackedId = id;
      this.points = [];
      this.lastTick = -1;
    }
    if (id === null || tick === this.lastTick) return;
    this.lastTick = tick;
    this.points.push([x, y]);
    if (this.points.length > TRAIL_CAP) {
      this.points.splice(0, this.points.length - TRAIL_CAP);
    }
  }

  get(): [number, number][] {
    return this.points;
  }

  clear(): void {
    this.points = [];
    this.lastTick = -1;
  }
}
