import { describe, expect, it } from "vitest";
import { parseServerFrame } from "./types.js";

const GOOD_SNAPSHOT = JSON.stringify({
  type: "snapshot",
  tick: 42,
  sim_time_s: 42 / 31,
  speed_factor: 1,
  paused: false,
  comm_radius_mm: 100,
  bots: [
    { id: 0, x_mm: 1.5, y_mm: -2, theta_rad: 0.3, led: "3,0,0", leg_points: [[1, 2], [3, 4], [5, 6]] },
  ],
});

describe("parseServerFrame", () => {
  it("accepts a valid snapshot", () => {
    const frame = parseServerFrame(GOOD_SNAPSHOT);
    expect(frame?.type).toBe("snapshot");
    if (frame?.type === "snapshot") {
      expect(frame.tick).toBe(42);
      expect(frame.bots[0].led).toBe("3,0,0");
    }
  });

  it("accepts ack and error frames", () => {
    expect(parseServerFrame('{"type":"ack","seq":3}')?.type).toBe("ack");
    const err = parseServerFrame('{"type":"error","reason":"nope"}');
    expect(err?.type).toBe("error");
  });

  it("rejects malformed JSON instead of throwing", () => {
    expect(parseServerFrame("{oops")).toBeNull();
  });

  it("rejects snapshots with missing bot fields", () => {
    const broken = JSON.parse(GOOD_SNAPSHOT);
    delete broken.bots[0].theta_rad;
    expect(parseServerFrame(JSON.stringify(broken))).toBeNull();
  });

  it("rejects unknown frame types", () => {
    expect(parseServerFrame('{"type":"mystery"}')).toBeNull();
  });
});
