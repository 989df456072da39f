/**
 * DOM glue: wires the session machine to a canvas, a HUD panel, and the
 * keyboard. Everything testable lives in the sibling modules; this file
 * only moves data between them and the page.
 */

import { DEFAULT_SCALE, FRAME_SIDE, scaleFrame } from "./frame.js";
import { compassNeedle, doneBanner, HudModel } from "./hud.js";
import { ObsMessage } from "./protocol.js";
import { browserDeps, ClientSession } from "./session.js";

const TASKS = [
    "treechop",
    "navigate-sparse",
    "navigate-dense",
    "obtain-iron-pickaxe",
    "obtain-cooked-meat-cow",
    "obtain-cooked-meat-chicken",
    "obtain-cooked-meat-sheep",
    "obtain-cooked-meat-pig",
    "obtain-diamond",
    "survival",
] as const;

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K, className?: string): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (className) {
        node.className = className;
    }
    return node;
}

class PlayPage {
    private session: ClientSession | null = null;
    private canvas: HTMLCanvasElement;
    private ctx: CanvasRenderingContext2D;
    private taskSelect: HTMLSelectElement;
    private seedInput: HTMLInputElement;
    private playButton: HTMLButtonElement;
    private banner: HTMLElement;
    private scoreEl: HTMLElement;
    private tickEl: HTMLElement;
    private phaseEl: HTMLElement;
    private inventoryEl: HTMLElement;
    private compassCanvas: HTMLCanvasElement;

    constructor(root: HTMLElement) {
        const side = FRAME_SIDE * DEFAULT_SCALE;

        const controls = el("div", "controls");
        this.taskSelect = el("select");
        for (const task of TASKS) {
            const option = el("option");
            option.value = task;
            option.textContent = task;
            this.taskSelect.appendChild(option);
        }
        this.seedInput = el("input");
        this.seedInput.placeholder = "seed (optional)";
        this.seedInput.inputMode = "numeric";
        this.playButton = el("button");
        this.playButton.textContent = "play";
        controls.append(this.taskSelect, this.seedInput, this.playButton);

        this.banner = el("div", "banner hidden");

        const stage = el("div", "stage");
        this.canvas = el("canvas");
        this.canvas.width = side;
        this.canvas.height = side;
        const ctx = this.canvas.getContext("2d");
        if (ctx === null) {
            throw new Error("canvas 2d context unavailable");
        }
        this.ctx = ctx;

        const hud = el("div", "hud");
        this.phaseEl = el("div", "hud-phase");
        this.scoreEl = el("div", "hud-score");
        this.tickEl = el("div", "hud-tick");
        this.compassCanvas = el("canvas", "hud-compass");
        this.compassCanvas.width = 64;
        this.compassCanvas.height = 64;
        this.inventoryEl = el("div", "hud-inventory");
        hud.append(this.phaseEl, this.scoreEl, this.tickEl,
                   this.compassCanvas, this.inventoryEl);
        stage.append(this.canvas, hud);

        root.append(controls, this.banner, stage);

        this.playButton.addEventListener("click", () => this.play());
        document.addEventListener("keydown", (ev) => {
            if (ev.target === this.seedInput) {
                return;
            }
            if (this.session !== null) {
                this.session.keyDown(ev.code);
                ev.preventDefault();
            }
        });
        this.setPhase("idle");
    }

    private play(): void {
        this.session?.close();
        this.hideBanner();
        const seedText = this.seedInput.value.trim();
        const seed = seedText === "" ? undefined : Number(seedText);
        const proto = location.protocol === "https:" ? "wss" : "ws";
        const url = `${proto}://${location.host}/play`;
        this.session = new ClientSession(browserDeps(), {
            onPhase: (phase) => this.setPhase(phase),
            onObs: (obs, hud, pov) => this.render(obs, hud, pov),
            onServerError: (error) =>
                this.showBanner(`${error.code}: ${error.detail}`),
            onConnectionError: (detail) => this.showBanner(detail),
        });
        this.session.connectAndStart(url, this.taskSelect.value,
                                     Number.isFinite(seed) ? seed : undefined);
    }

    private render(obs: ObsMessage, hud: HudModel, pov: Uint8Array | null): void {
        if (pov !== null) {
            const pixels = scaleFrame(pov, DEFAULT_SCALE);
            const side = FRAME_SIDE * DEFAULT_SCALE;
            this.ctx.putImageData(new ImageData(pixels, side, side), 0, 0);
        }
        this.scoreEl.textContent = `score ${hud.score.toFixed(2)}`;
        this.tickEl.textContent = `tick ${hud.tick}`;
        this.inventoryEl.innerHTML = "";
        for (const [name, count] of hud.inventory) {
            const row = el("div", "hud-item");
            row.textContent = `${name} x${count}`;
            this.inventoryEl.appendChild(row);
        }
        this.drawCompass(hud.compass);
        const over = doneBanner(hud);
        if (over !== null) {
            this.showBanner(over);
        }
    }

    private drawCompass(angle: number): void {
        const ctx = this.compassCanvas.getContext("2d");
        if (ctx === null) {
            return;
        }
        const task = this.session?.started?.task ?? "";
        ctx.clearRect(0, 0, 64, 64);
        if (!task.startsWith("navigate")) {
            return;
        }
        const [dx, dy] = compassNeedle(angle);
        ctx.beginPath();
        ctx.arc(32, 32, 28, 0, 2 * Math.PI);
        ctx.strokeStyle = "#888";
        ctx.stroke();
        ctx.beginPath();
        ctx.moveTo(32, 32);
        ctx.lineTo(32 + 24 * dx, 32 + 24 * dy);
        ctx.strokeStyle = "#e33";
        ctx.lineWidth = 2;
        ctx.stroke();
        ctx.lineWidth = 1;
    }

    private setPhase(phase: string): void {
        this.phaseEl.textContent = phase;
        this.playButton.textContent =
            phase === "live" || phase === "starting" ? "restart" : "play";
    }

    private showBanner(text: string): void {
        this.banner.textContent = text;
        this.banner.classList.remove("hidden");
    }

    private hideBanner(): void {
        this.banner.classList.add("hidden");
    }
}

const root = document.getElementById("app");
if (root !== null) {
    new PlayPage(root);
}
