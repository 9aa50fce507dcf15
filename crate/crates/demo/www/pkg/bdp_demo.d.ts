/* tslint:disable */
/* eslint-disable */

/**
 * Gallery chains with their boundary classes.
 */
export function gallery_list(): string;

/**
 * Density and distribution function of `T_{i,n}` on `[0, t_max]`. Downward
 * passages use the chain reflected at `i`.
 */
export function hitting_curves(name: string, i: number, n: number, t_max: number, points: number): string;

/**
 * Separation `S(t)` and `s_0(t)` against the SST tail from 0, on a log grid
 * up to `t_max`, for start states `0..=max_state`.
 */
export function separation_curve(name: string, t_max: number, points: number, max_state: number): string;

/**
 * Lowest `count` eigenvalues of truncations at sizes `8, 16, ..., 2^max_pow`,
 * with the certified limit when the boundary has one.
 */
export function spectrum_convergence(name: string, count: number, max_pow: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly gallery_list: () => [number, number];
    readonly hitting_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly separation_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly spectrum_convergence: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
