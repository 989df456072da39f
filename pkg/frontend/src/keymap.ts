/**
 * Keyboard-to-action mapping. Keys are KeyboardEvent.code values so the
 * layout is stable across keyboard locales.
 */

export type Keymap = Readonly<Record<string, number>>;

/**
 * Arrows and WASD move and turn, space attacks, and the digit row walks
 * the place/craft/smelt actions in server code order (1 -> place table,
 * ..., 0 -> smelt meat).
 */
export const DEFAULT_KEYMAP: Keymap = {
    ArrowUp: 1,
    KeyW: 1,
    ArrowDown: 2,
    KeyS: 2,
    ArrowLeft: 3,
    KeyA: 3,
    ArrowRight: 4,
    KeyD: 4,
    Space: 5,
    Digit1: 6,
    Digit2: 7,
    Digit3: 8,
    Digit4: 9,
    Digit5: 10,
    Digit6: 11,
    Digit7: 12,
    Digit8: 13,
    Digit9: 14,
    Digit0: 15,
};

/** Action code for a key, or undefined when the key is unmapped. */
export function lookupAction(keymap: Keymap, code: string): number | undefined {
    return Object.prototype.hasOwnProperty.call(keymap, code)
        ? keymap[code]
        : undefined;
}
