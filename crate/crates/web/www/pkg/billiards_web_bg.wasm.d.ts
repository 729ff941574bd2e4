/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_trajectory2d_free: (a: number, b: number) => void;
export const corner_gap_sweep: (a: number, b: number, c: number) => [number, number, number, number];
export const polygon_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const trajectory2d_alcove: (a: number) => [number, number];
export const trajectory2d_path: (a: number) => [number, number];
export const wedge_fan: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
