/**
 * Wire types for the play server's WebSocket protocol: UTF-8 JSON text
 * frames, one message per frame. The client never simulates game logic;
 * everything it shows comes from parsed server messages.
 */

export const POV_BYTES = 64 * 64 * 3;

/** Action codes, mirroring the server's action enum. */
export const ACTION_NAMES = [
    "noop",
    "forward",
    "backward",
    "turn-left",
    "turn-right",
    "attack",
    "place-table",
    "place-furnace",
    "craft-planks",
    "craft-stick",
    "craft-table",
    "craft-wooden-pickaxe",
    "craft-stone-pickaxe",
    "craft-iron-pickaxe",
    "smelt-iron-ingot",
    "smelt-meat",
] as const;

export const N_ACTIONS = ACTION_NAMES.length;

/** Inventory slot names, in the slot order the server sends counts. */
export const ITEM_NAMES = [
    "Log",
    "Planks",
    "Stick",
    "CraftingTable",
    "WoodenPickaxe",
    "Cobblestone",
    "Furnace",
    "StonePickaxe",
    "IronOre",
    "IronIngot",
    "IronPickaxe",
    "Diamond",
    "IronAxe",
    "RawMeatCow",
    "RawMeatChicken",
    "RawMeatSheep",
    "RawMeatPig",
    "CookedMeatCow",
    "CookedMeatChicken",
    "CookedMeatSheep",
    "CookedMeatPig",
] as const;

export interface ObsMessage {
    type: "Obs";
    tick: number;
    pov_b64: string;
    inventory: number[];
    compass: number;
    reward: number;
    score: number;
    done: boolean;
    done_reason: string | null;
}

export interface StartedMessage {
    type: "Started";
    session_id: string;
    task: string;
    tick_rate: number;
}

export interface ErrorMessage {
    type: "Error";
    code: "bad_message" | "no_session" | "bad_task" | "session_active";
    detail: string;
}

export type ServerMessage = ObsMessage | StartedMessage | ErrorMessage;

/** Thrown when a server frame does not decode to a known message shape. */
export class ProtocolError extends Error {}

function asNumber(value: unknown, field: string): number {
    if (typeof value !== "number" || !Number.isFinite(value)) {
        throw new ProtocolError(`${field} is not a finite number`);
    }
    return value;
}

function asString(value: unknown, field: string): string {
    if (typeof value !== "string") {
        throw new ProtocolError(`${field} is not a string`);
    }
    return value;
}

/** Parse one server text frame; throws ProtocolError on anything else. */
export function parseServerMessage(text: string): ServerMessage {
    let raw: unknown;
    try {
        raw = JSON.parse(text);
    } catch {
        throw new ProtocolError("frame is not JSON");
    }
    if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
        throw new ProtocolError("frame is not an object");
    }
    const msg = raw as Record<string, unknown>;
    switch (msg.type) {
        case "Obs": {
            if (!Array.isArray(msg.inventory)) {
                throw new ProtocolError("inventory is not an array");
            }
            const doneReason = msg.done_reason ?? null;
            if (doneReason !== null && typeof doneReason !== "string") {
                throw new ProtocolError("done_reason is not a string");
            }
            return {
                type: "Obs",
                tick: asNumber(msg.tick, "tick"),
                pov_b64: asString(msg.pov_b64, "pov_b64"),
                inventory: msg.inventory.map((n, i) =>
                    asNumber(n, `inventory[${i}]`)),
                compass: asNumber(msg.compass, "compass"),
                reward: asNumber(msg.reward, "reward"),
                score: asNumber(msg.score, "score"),
                done: msg.done === true,
                done_reason: doneReason,
            };
        }
        case "Started":
            return {
                type: "Started",
                session_id: asString(msg.session_id, "session_id"),
                task: asString(msg.task, "task"),
                tick_rate: asNumber(msg.tick_rate, "tick_rate"),
            };
        case "Error": {
            const code = asString(msg.code, "code");
            if (code !== "bad_message" && code !== "no_session" &&
                code !== "bad_task" && code !== "session_active") {
                throw new ProtocolError(`unknown error code ${code}`);
            }
            return {
                type: "Error",
                code,
                detail: asString(msg.detail, "detail"),
            };
        }
        default:
            throw new ProtocolError("unknown message type");
    }
}

export function encodeStart(task: string, seed?: number): string {
    return seed === undefined
        ? JSON.stringify({ type: "Start", task })
        : JSON.stringify({ type: "Start", task, seed });
}

export function encodeAct(code: number): string {
    if (!Number.isInteger(code) || code < 0 || code >= N_ACTIONS) {
        throw new ProtocolError(`action code ${code} out of range`);
    }
    return JSON.stringify({ type: "Act", code });
}

/**
 * Decode a base64 pov payload to raw RGB bytes. Throws ProtocolError on
 * malformed base64 or any length other than 64*64*3.
 */
export function decodePov(b64: string): Uint8Array {
    let binary: string;
    try {
        binary = atob(b64);
    } catch {
        throw new ProtocolError("pov payload is not base64");
    }
    if (binary.length !== POV_BYTES) {
        throw new ProtocolError(
            `pov payload is ${binary.length} bytes, expected ${POV_BYTES}`);
    }
    const bytes = new Uint8Array(POV_BYTES);
    for (let i = 0; i < POV_BYTES; i++) {
        bytes[i] = binary.charCodeAt(i);
    }
    return bytes;
}
