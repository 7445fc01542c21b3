import { describe, expect, it } from "vitest";
import { TRAIL_CAP, TrailStore } from "./trails.js";

describe("TrailStore", () => {
  it("caps at 500 points, keeping the newest", () => {
    const store = new TrailStore();
    for (let t = 0; t < 700; t++) store.record(3, t, t, -t);
    const pts = store.get();
    expect(pts).toHaveLength(TRAIL_CAP);
    expect(pts[0]).toEqual([200, -200]);
    expect(pts[pts.length - 1]).toEqual([699, -699]);
  });

  it("resets when the tracked robot changes", () => {
    const store = new TrailStore();
    store.record(1, 0, 5, 5);
    store.record(1, 1, 6, 6);
    store.record(2, 2, 7, 7);
    expect(store.get()).toEqual([[7, 7]]);
  });

  it("ignores repeated frames of the same tick", () => {
    const store = new TrailStore();
    store.record(1, 0, 5, 5);
    store.record(1, 0, 5, 5);
    expect(store.get()).toHaveLength(1);
  });

  it("records nothing without a selection", () => {
    const store = new TrailStore();
    store.record(null, 0, 5, 5);
    expect(store.get()).toEqual([]);
  });
});
