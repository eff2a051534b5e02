/* tslint:disable */
/* eslint-disable */

/**
 * `[real radius, imaginary radius]` of a stability polynomial.
 */
export function axis_radii(poly: string): Float64Array;

/**
 * `(Pe, Ĉ)` on a logarithmic Péclet grid.
 */
export function cfl_curve(scheme: string, time: string, pe_min: number, pe_max: number, points: number, nodes: number): Float64Array;

/**
 * `ρ(s)` of a named scheme; `pe` may be `Infinity`. `nodes > 0` selects the
 * discrete spectrum of that grid instead of `samples` uniform points.
 */
export function spectral_curve(scheme: string, pe: number, samples: number, nodes: number): Float64Array;

/**
 * Boundary of the stability region of `rk4`, `rkd`, `bakker`, ... or `custom:w3,w4`.
 */
export function stability_region(poly: string, rays: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly axis_radii: (a: number, b: number) => [number, number, number, number];
    readonly cfl_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly spectral_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly stability_region: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
