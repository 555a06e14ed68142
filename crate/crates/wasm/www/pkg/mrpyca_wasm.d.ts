/* tslint:disable */
/* eslint-disable */

export class Simplified {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly error: number;
    /**
     * Percentage against the exact optimum, NaN when the curve is too
     * large to solve exactly.
     */
    readonly fidelity: number;
    /**
     * Work counter of the chosen algorithm.
     */
    readonly transitions: number;
    readonly vertices: Uint32Array;
}

/**
 * Full multiresolution pyramid as a pyramid JSON document (one-based vertices).
 */
export function pyramid(xy: Float64Array, k: number, rho: number, alpha: number): string;

/**
 * Runs one algorithm (`fsdp`, `pyca`, `mr-pyca`, `dp`, `merge-l2`) with `k` segments.
 */
export function simplify(xy: Float64Array, algo: string, k: number, rho: number, alpha: number): Simplified;

/**
 * Seeded synthetic planar curve as a flat coordinate array.
 */
export function synthesize(kind: string, n: number, seed: number, roughness: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simplified_free: (a: number, b: number) => void;
    readonly pyramid: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly simplified_error: (a: number) => number;
    readonly simplified_fidelity: (a: number) => number;
    readonly simplified_transitions: (a: number) => number;
    readonly simplified_vertices: (a: number) => [number, number];
    readonly simplify: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly synthesize: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
