// Wire protocol types, mirroring the bridge's /ws schemas verbatim.

export interface WireBot {
  id: number;
  x_mm: number;
  y_mm: number;
  theta_rad: number;
  led: string; // "r,g,b" with components in 0..3
  leg_points: [number, number][]; // front, rear-left, rear-right
}

export interface WireSnapshot {
  type: "snapshot";
  tick: number;
  sim_time_s: number;
  speed_factor: number;
  paused: boolean;
  comm_radius_mm: number;
  bots: WireBot[];
}

export type WireCommand =
  | { type: "pause"; seq?: number }
  | { type: "resume"; seq?: number }
  | { type: "set_speed"; factor: number; seq?: number }
  | { type: "move_bot"; id: number; x_mm: number; y_mm: number; seq?: number }
  | { type: "toggle_comms_overlay"; seq?: number };

export interface AckFrame {
  type: "ack";
  seq?: number;
}

export interface ErrorFrame {
  type: "error";
  reason: string;
  seq?: number;
}

export type ServerFrame = WireSnapshot | AckFrame | ErrorFrame;

export function parseServerFrame(text: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const frame = data as Record<string, unknown>;
  if (frame.type === "snapshot") {
    return isSnapshot(frame) ? (frame as unknown as WireSnapshot) : null;
  }
  if (frame.type === "ack" || frame.type === "error") {
    return frame as unknown as AckFrame | ErrorFrame;
  }
  return null;
}

function isSnapshot(frame: Record<string, unknown>): boolean {
  if (typeof frame.tick !== "number" || typeof frame.sim_time_s !== "number") return false;
  if (typeof frame.paused !== "boolean") return false;
  if (!Array.isArray(frame.bots)) return false;
  return (frame.bots as unknown[]).every((b) => {
    if (typeof b !== "object" || b === null) return false;
    const bot = b as Record<string, unknown>;
    return (
      typeof bot.id === "number" &&
      typeof bot.x_mm === "number" &&
      typeof bot.y_mm === "number" &&
      typeof bot.theta_rad === "number" &&
      typeof bot.led === "string" &&
      Array.isArray(bot.leg_points)
    );
  });
}
