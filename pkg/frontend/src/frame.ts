/**
 * Frame scaling: the 64x64 RGB view is blown up nearest-neighbor so the
 * human sees exactly the pixels a learned policy sees, just bigger.
 */

export const FRAME_SIDE = 64;
export const DEFAULT_SCALE = 8;

/**
 * Expand raw RGB bytes (row-major, 64*64*3) into an RGBA buffer scaled up
 * by an integer factor, suitable for ImageData. Pure pass-through: output
 * pixel (x, y) equals input pixel (x / scale, y / scale), alpha 255.
 */
export function scaleFrame(rgb: Uint8Array,
                           scale: number): Uint8ClampedArray<ArrayBuffer> {
    if (rgb.length !== FRAME_SIDE * FRAME_SIDE * 3) {
        throw new Error(`expected ${FRAME_SIDE * FRAME_SIDE * 3} bytes, got ${rgb.length}`);
    }
    if (!Number.isInteger(scale) || scale < 1) {
        throw new Error(`scale must be a positive integer, got ${scale}`);
    }
    const side = FRAME_SIDE * scale;
    const out = new Uint8ClampedArray(side * side * 4);
    for (let y = 0; y < side; y++) {
        const srcRow = (y / scale) | 0;
        for (let x = 0; x < side; x++) {
            const src = (srcRow * FRAME_SIDE + ((x / scale) | 0)) * 3;
            const dst = (y * side + x) * 4;
            out[dst] = rgb[src]!;
            out[dst + 1] = rgb[src + 1]!;
            out[dst + 2] = rgb[src + 2]!;
            out[dst + 3] = 255;
        }
    }
    return out;
}
