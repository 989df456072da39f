/**
 * Full-stack check against a real play server: a scripted key-event
 * session on treechop must leave a corpus log whose offline replay
 * reproduces exactly the score sequence the client displayed live.
 */
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { execFile, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readdirSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import WebSocket from "ws";

import { scaleFrame } from "../src/frame.js";
import { ClientSession, SessionDeps } from "../src/session.js";

const execFileAsync = promisify(execFile);

const PORT = 18600 + (process.pid % 1000);
const TICK_RATE = 40;

let corpusRoot: string;
let server: ChildProcess;
let serverLog = "";

function nodeDeps(): SessionDeps {
    return {
        connect: (url) => new WebSocket(url) as never,
        now: () => performance.now(),
        setTimer: (fn, ms) => setTimeout(fn, ms),
        clearTimer: (handle) => clearTimeout(handle as NodeJS.Timeout),
    };
}

function sleep(ms: number): Promise<void> {
    return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForServer(): Promise<void> {
    const deadline = Date.now() + 20_000;
    while (Date.now() < deadline) {
        if (server.exitCode !== null) {
            throw new Error(`server exited early:\n${serverLog}`);
        }
        try {
            await fetch(`http://127.0.0.1:${PORT}/`);
            return;
        } catch {
            await sleep(100);
        }
    }
    throw new Error(`server not reachable:\n${serverLog}`);
}

async function waitForLog(): Promise<string> {
    const deadline = Date.now() + 10_000;
    while (Date.now() < deadline) {
        const entries = readdirSync(corpusRoot, { withFileTypes: true })
            .filter((e) => e.isDirectory());
        if (entries.length > 0) {
            return entries[0]!.name;
        }
        await sleep(100);
    }
    throw new Error("no trajectory appeared in the corpus");
}

beforeAll(async () => {
    corpusRoot = mkdtempSync(join(tmpdir(), "play-corpus-"));
    server = spawn("gridcraft", [
        "serve-play",
        "--corpus", corpusRoot,
        "--bind", `127.0.0.1:${PORT}`,
        "--tick-rate", String(TICK_RATE),
    ]);
    server.stdout?.on("data", (chunk) => { serverLog += chunk; });
    server.stderr?.on("data", (chunk) => { serverLog += chunk; });
    await waitForServer();
}, 30_000);

afterAll(async () => {
    server.kill("SIGTERM");
    await sleep(300);
    server.kill("SIGKILL");
    rmSync(corpusRoot, { recursive: true, force: true });
});

describe("live play against the real server", () => {
    it("replays offline to the exact scores shown live", async () => {
        const liveRows: Array<[number, number]> = [];
        let firstPov: Uint8Array | null = null;
        let livePhase = false;
        const session = new ClientSession(nodeDeps(), {
            onPhase: (phase) => { livePhase ||= phase === "live"; },
            onObs: (obs, hud, pov) => {
                liveRows.push([obs.tick, hud.score]);
                if (firstPov === null && pov !== null) {
                    firstPov = pov;
                }
            },
        });
        session.connectAndStart(`ws://127.0.0.1:${PORT}/play`, "treechop", 7);

        // Scripted play: hammer attack with bursts of walking, the way a
        // human would chop the nearest tree.
        const script = ["Space", "Space", "Space", "KeyW", "Space", "KeyA"];
        let step = 0;
        const input = setInterval(() => {
            session.keyDown(script[step++ % script.length]!);
        }, 15);
        const deadline = Date.now() + 15_000;
        while (liveRows.length < 60 && Date.now() < deadline) {
            await sleep(50);
        }
        clearInterval(input);
        session.close();

        expect(livePhase).toBe(true);
        expect(liveRows.length).toBeGreaterThanOrEqual(60);

        // Frame pass-through: the live pov is raw 64x64 RGB, and scaling
        // keeps pixel (0,0) exactly.
        expect(firstPov).not.toBeNull();
        const pov = firstPov as unknown as Uint8Array;
        expect(pov.length).toBe(64 * 64 * 3);
        const scaled = scaleFrame(pov, 8);
        expect([scaled[0], scaled[1], scaled[2]])
            .toEqual([pov[0], pov[1], pov[2]]);

        const trajectoryId = await waitForLog();
        const probe = [
            "import json, sys",
            "from pathlib import Path",
            "from gridcraft.dataset import read_trajectory",
            "from gridcraft.trajectory import annotate",
            "root = Path(sys.argv[1])",
            "log = read_trajectory(root, sys.argv[2])",
            "rewards = dict(annotate(log).per_tick_rewards)",
            "rows, running = [], 0.0",
            "for tick in range(1, log.actions.size + 1):",
            "    running += rewards.get(tick, 0.0)",
            "    rows.append([tick, running])",
            "print(json.dumps({'rows': rows, 'truncated': log.truncated,",
            "                  'player_kind': log.player_kind}))",
        ].join("\n");
        const { stdout } = await execFileAsync(
            "python3", ["-c", probe, corpusRoot, trajectoryId]);
        const replay = JSON.parse(stdout) as {
            rows: Array<[number, number]>;
            truncated: boolean;
            player_kind: number;
        };

        expect(replay.player_kind).toBe(0);  // human
        expect(replay.truncated).toBe(true); // we hung up mid-episode
        expect(replay.rows.length).toBeGreaterThanOrEqual(liveRows.length);
        for (const [tick, score] of liveRows) {
            expect(replay.rows[tick - 1]).toEqual([tick, score]);
        }
    }, 60_000);
});
