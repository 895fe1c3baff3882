// Wire types for protocol version 1 (see ../../docs/protocol.md).

export const PROTOCOL_VERSION = 1;

export type PoseTriple = [number, number, number]; // x m, y m, theta rad

export interface MapPayload {
  version: number;
  width: number;
  height: number;
  resolution: number;
  origin: PoseTriple;
  /** [cell, count] runs, row-major from the lowest-y row; cells are
   * 0 free, 1 occupied, -1 unknown. */
  rle: [number, number][];
}

export interface ScanBlock {
  angle_min: number;
  increment: number;
  range_max: number;
  stamp: number;
  ranges: number[];
}

export type GoalStateName =
  | "pending"
  | "active"
  | "succeeded"
  | "aborted"
  | "preempted";

export interface GoalStatus {
  id: number;
  state: GoalStateName;
  target: PoseTriple;
  elapsed: number;
  reason: string | null;
  feedback: PoseTriple | null;
}

export interface Snapshot {
  version: number;
  seq: number;
  sim_time: number;
  true_pose: PoseTriple;
  estimated_pose: PoseTriple;
  collision: boolean;
  map_version: number;
  particles: PoseTriple[];
  scan: ScanBlock | null;
  global_path: [number, number][] | null;
  goal_status: GoalStatus | null;
  /** Attached only on frames where the client has not seen map_version. */
  map?: MapPayload;
}

export interface Ack {
  kind?: string;
  accepted: boolean;
  reason?: string;
  twist?: [number, number];
  goal_id?: number;
  [extra: string]: unknown;
}

export type Command =
  | { kind: "teleop_key"; payload: { key: string } }
  | { kind: "set_goal"; payload: { x: number; y: number; yaw: number } }
  | { kind: "cancel_goal"; payload: { id?: number } }
  | { kind: "set_param"; payload: { name: string; value: number } };
