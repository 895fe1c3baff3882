import { screenToWorld, ViewState } from "./transform.js";
import { Command } from "./types.js";

/** Click-drag goal: the press point is the goal position, the drag
 * direction (in world coordinates, so after the y flip) is the heading.
 * A zero-length drag means yaw 0.
 */
export function goalFromDrag(view: ViewState,
                             downX: number, downY: number,
                             upX: number, upY: number): Command {
  const [x, y] = screenToWorld(view, downX, downY);
  const [x2, y2] = screenToWorld(view, upX, upY);
  const dx = x2 - x;
  const dy = y2 - y;
  const yaw = dx === 0 && dy === 0 ? 0 : Math.atan2(dy, dx);
  return { kind: "set_goal", payload: { x, y, yaw } };
}
