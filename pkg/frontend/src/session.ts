/**
 * Live play session: one WebSocket, one episode. The session machine is
 * deliberately dumb — it forwards key presses as action codes (throttled
 * to the server's tick interval) and republishes whatever the server
 * says. All game state lives on the server; reloading the page loses
 * nothing but the view.
 */

import { DEFAULT_KEYMAP, Keymap, lookupAction } from "./keymap.js";
import {
    ErrorMessage,
    ObsMessage,
    ProtocolError,
    StartedMessage,
    decodePov,
    encodeAct,
    encodeStart,
    parseServerMessage,
} from "./protocol.js";
import { HudModel, hudFromObs } from "./hud.js";

export type SessionPhase =
    | "idle"        // nothing attempted yet
    | "connecting"  // socket opening
    | "ready"       // socket open, no episode started
    | "starting"    // Start sent, waiting for Started
    | "live"        // episode running
    | "ended"       // episode finished or connection dropped mid-episode
    | "failed";     // could not connect

/** The slice of the WebSocket interface the session uses; satisfied by
 * the browser's WebSocket and by the `ws` package's client. */
export interface WireSocket {
    send(data: string): void;
    close(): void;
    onopen: ((ev?: unknown) => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
    onclose: ((ev?: unknown) => void) | null;
    onerror: ((ev?: unknown) => void) | null;
}

/** Environment hooks, injectable so tests can fake sockets and time. */
export interface SessionDeps {
    connect(url: string): WireSocket;
    now(): number;
    setTimer(fn: () => void, ms: number): unknown;
    clearTimer(handle: unknown): void;
}

export interface SessionEvents {
    onPhase?(phase: SessionPhase): void;
    /** pov is null when the frame payload failed to decode (frame skipped). */
    onObs?(obs: ObsMessage, hud: HudModel, pov: Uint8Array | null): void;
    onServerError?(error: ErrorMessage): void;
    /** Transport-level trouble: refusal, drop, unparseable frame. */
    onConnectionError?(detail: string): void;
}

export class ClientSession {
    phase: SessionPhase = "idle";
    started: StartedMessage | null = null;
    lastObs: ObsMessage | null = null;
    hud: HudModel | null = null;
    framesSkipped = 0;

    private deps: SessionDeps;
    private events: SessionEvents;
    private keymap: Keymap;
    private socket: WireSocket | null = null;
    private intervalMs = 100;
    private lastSentAt = -Infinity;
    private pendingCode: number | null = null;
    private flushHandle: unknown = null;
    private closing = false;

    constructor(deps: SessionDeps, events: SessionEvents = {},
                keymap: Keymap = DEFAULT_KEYMAP) {
        this.deps = deps;
        this.events = events;
        this.keymap = keymap;
    }

    /** Open the socket and start an episode as soon as it connects. */
    connectAndStart(url: string, task: string, seed?: number): void {
        this.setPhase("connecting");
        let socket: WireSocket;
        try {
            socket = this.deps.connect(url);
        } catch (err) {
            this.setPhase("failed");
            this.events.onConnectionError?.(String(err));
            return;
        }
        this.socket = socket;
        socket.onopen = () => {
            this.setPhase("ready");
            this.start(task, seed);
        };
        socket.onmessage = (ev) => this.handleFrame(String(ev.data));
        socket.onerror = () => {
            if (this.phase === "connecting") {
                this.setPhase("failed");
                this.events.onConnectionError?.("connection refused");
            }
        };
        socket.onclose = () => this.handleClose();
    }

    /** Ask the server for an episode; valid in the "ready" phase only. */
    start(task: string, seed?: number): void {
        if (this.phase !== "ready" || this.socket === null) {
            return;
        }
        this.socket.send(encodeStart(task, seed));
        this.setPhase("starting");
    }

    /** Feed a KeyboardEvent.code; unmapped keys and dead phases are ignored. */
    keyDown(code: string): void {
        if (this.phase !== "live") {
            return;
        }
        const action = lookupAction(this.keymap, code);
        if (action !== undefined) {
            this.sendAction(action);
        }
    }

    /**
     * Send an action, at most one per server tick interval. Excess presses
     * buffer latest-wins and flush when the interval elapses, matching the
     * server's own latest-wins tick consumption.
     */
    sendAction(code: number): void {
        if (this.phase !== "live" || this.socket === null) {
            return;
        }
        const now = this.deps.now();
        const elapsed = now - this.lastSentAt;
        if (elapsed >= this.intervalMs) {
            this.socket.send(encodeAct(code));
            this.lastSentAt = now;
            return;
        }
        this.pendingCode = code;
        if (this.flushHandle === null) {
            this.flushHandle = this.deps.setTimer(
                () => this.flushPending(), this.intervalMs - elapsed);
        }
    }

    close(): void {
        this.closing = true;
        this.cancelFlush();
        this.socket?.close();
    }

    private flushPending(): void {
        this.flushHandle = null;
        if (this.pendingCode === null || this.phase !== "live" ||
            this.socket === null) {
            this.pendingCode = null;
            return;
        }
        this.socket.send(encodeAct(this.pendingCode));
        this.lastSentAt = this.deps.now();
        this.pendingCode = null;
    }

    private handleFrame(text: string): void {
        let message;
        try {
            message = parseServerMessage(text);
        } catch (err) {
            if (err instanceof ProtocolError) {
                this.events.onConnectionError?.(`bad server frame: ${err.message}`);
                return;
            }
            throw err;
        }
        switch (message.type) {
            case "Started":
                this.started = message;
                this.intervalMs = 1000 / message.tick_rate;
                this.setPhase("live");
                break;
            case "Obs": {
                this.lastObs = message;
                this.hud = hudFromObs(message);
                let pov: Uint8Array | null = null;
                try {
                    pov = decodePov(message.pov_b64);
                } catch {
                    this.framesSkipped += 1;
                }
                this.events.onObs?.(message, this.hud, pov);
                if (message.done) {
                    this.cancelFlush();
                    this.setPhase("ended");
                }
                break;
            }
            case "Error":
                this.events.onServerError?.(message);
                if (this.phase === "starting" && message.code === "bad_task") {
                    this.setPhase("ready");  // free to try another task
                }
                break;
        }
    }

    private handleClose(): void {
        this.cancelFlush();
        if (this.closing) {
            this.setPhase("ended");
        } else if (this.phase === "live" || this.phase === "starting") {
            this.events.onConnectionError?.("connection closed by server");
            this.setPhase("ended");
        } else if (this.phase === "connecting") {
            this.setPhase("failed");
            this.events.onConnectionError?.("connection refused");
        } else if (this.phase !== "failed") {
            this.setPhase("ended");
        }
    }

    private cancelFlush(): void {
        if (this.flushHandle !== null) {
            this.deps.clearTimer(this.flushHandle);
            this.flushHandle = null;
        }
        this.pendingCode = null;
    }

    private setPhase(phase: SessionPhase): void {
        if (phase !== this.phase) {
            this.phase = phase;
            this.events.onPhase?.(phase);
        }
    }
}

/** Real-browser defaults: global WebSocket and wall-clock timers. */
export function browserDeps(): SessionDeps {
    return {
        connect: (url) => new WebSocket(url) as unknown as WireSocket,
        now: () => performance.now(),
        setTimer: (fn, ms) => setTimeout(fn, ms),
        clearTimer: (handle) => clearTimeout(handle as number),
    };
}
