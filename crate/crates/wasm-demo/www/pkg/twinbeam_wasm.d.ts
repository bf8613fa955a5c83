/* tslint:disable */
/* eslint-disable */

export function evolve_curve(lambda: number, gamma_rate: number, thermal_m: number, t_max: number, points: number): Float64Array;

/**
 * Threshold time for the given source and channel; `Infinity` for pure loss.
 */
export function threshold(lambda: number, gamma_rate: number, thermal_m: number): number;

export function threshold_curve(thermal_m: number, n_max: number, step: number): Float64Array;

export function wigner_slice(lambda: number, gamma_rate: number, thermal_m: number, t: number, extent: number, pixels: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly evolve_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly threshold: (a: number, b: number, c: number) => [number, number, number];
    readonly threshold_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly wigner_slice: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
