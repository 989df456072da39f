/**
 * HUD model: the strip of numbers shown beside the frame. Pure data in,
 * pure data out — the DOM layer renders whatever this computes, and the
 * score is always the server's, never a client-side running total.
 */

import { ITEM_NAMES, ObsMessage } from "./protocol.js";

export interface HudModel {
    tick: number;
    score: number;
    /** (name, count) for every slot the player holds at least one of. */
    inventory: Array<[string, number]>;
    compass: number;
    done: boolean;
    doneReason: string | null;
}

export function hudFromObs(obs: ObsMessage): HudModel {
    const inventory: Array<[string, number]> = [];
    obs.inventory.forEach((count, slot) => {
        if (count > 0) {
            inventory.push([ITEM_NAMES[slot] ?? `slot${slot}`, count]);
        }
    });
    return {
        tick: obs.tick,
        score: obs.score,
        inventory,
        compass: obs.compass,
        done: obs.done,
        doneReason: obs.done_reason,
    };
}

/**
 * Unit vector for the compass needle in screen coordinates (y grows
 * downward): angle 0 points straight up, positive angles swing clockwise.
 */
export function compassNeedle(angle: number): [number, number] {
    return [Math.sin(angle), -Math.cos(angle)];
}

/** "Episode over" banner text, e.g. "episode over: tick_cap". */
export function doneBanner(model: HudModel): string | null {
    if (!model.done) {
        return null;
    }
    return `episode over: ${model.doneReason ?? "unknown"}`;
}
