/* tslint:disable */
/* eslint-disable */

export class Trajectory2D {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly alcove: string;
    readonly path: Float64Array;
}

export function corner_gap_sweep(lo: number, hi: number, n: number): Float64Array;

export function polygon_trajectory(vertices: Float64Array, x: number, y: number, dx: number, dy: number, horizon: number): Trajectory2D;

export function wedge_fan(alpha: number, offset: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_trajectory2d_free: (a: number, b: number) => void;
    readonly corner_gap_sweep: (a: number, b: number, c: number) => [number, number, number, number];
    readonly polygon_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly trajectory2d_alcove: (a: number) => [number, number];
    readonly trajectory2d_path: (a: number) => [number, number];
    readonly wedge_fan: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
