import { describe, expect, it } from "vitest";

import { goalFromDrag } from "../src/gesture.js";
import { identityView, ViewState } from "../src/transform.js";

function yawOf(view: ViewState, x1: number, y1: number, x2: number, y2: number): number {
  const cmd = goalFromDrag(view, x1, y1, x2, y2);
  if (cmd.kind !== "set_goal") throw new Error("wrong command kind");
  return cmd.payload.yaw;
}

describe("goal drag under the identity view", () => {
  // screen y grows downward, world y grows upward; these four must be
  // bit-exact, not approximate
  it("drag right is yaw 0", () => {
    expect(yawOf(identityView(), 10, 10, 11, 10)).toBe(0);
  });

  it("drag up is yaw pi/2", () => {
    expect(yawOf(identityView(), 10, 10, 10, 9)).toBe(Math.PI / 2);
  });

  it("drag left is yaw pi", () => {
    expect(yawOf(identityView(), 10, 10, 9, 10)).toBe(Math.PI);
  });

  it("drag down is yaw -pi/2", () => {
    expect(yawOf(identityView(), 10, 10, 10, 11)).toBe(-Math.PI / 2);
  });

  it("zero-length drag is yaw 0 at the click position", () => {
    const cmd = goalFromDrag(identityView(), 7, -3, 7, -3);
    expect(cmd).toEqual({ kind: "set_goal", payload: { x: 7, y: 3, yaw: 0 } });
  });
});

describe("goal drag under pan and zoom", () => {
  it("position is the inverse transform of the press point", () => {
    const view = identityView();
    view.panX = 40;
    view.panY = 30;
    view.zoom = 20;
    // world (2, 1) sits at screen (40 + 40, 30 - 20)
    const cmd = goalFromDrag(view, 80, 10, 100, 10);
    if (cmd.kind !== "set_goal") throw new Error("wrong command kind");
    expect(cmd.payload.x).toBeCloseTo(2, 12);
    expect(cmd.payload.y).toBeCloseTo(1, 12);
    expect(cmd.payload.yaw).toBe(0);
  });

  it("heading is measured in world coordinates, not pixels", () => {
    const view = identityView();
    view.zoom = 50;
    // 45 degrees up-right on screen is 45 degrees in the world too,
    // zoom is isotropic
    expect(yawOf(view, 0, 0, 30, -30)).toBeCloseTo(Math.PI / 4, 12);
  });
});
