/* tslint:disable */
/* eslint-disable */

/**
 * ASE versus BS density, bit/s/Hz/km². Returns `[λ_b..., exact..., lower..., upper...]`.
 */
export function aseCurve(lambda_u: number, t_db: number, log_min: number, log_max: number, n: number): Float64Array;

/**
 * Coverage versus BS density for one UE density (per km², `<= 0` or non-finite for full load).
 * Returns `[λ_b..., exact..., lower..., upper..., plateau]`, densities per km².
 */
export function coverageCurve(lambda_u: number, t_db: number, log_min: number, log_max: number, n: number): Float64Array;

/**
 * Attenuation in dB for every variant over log-spaced distances (m).
 * Returns `[d..., then one block of n values per variant in declaration order]`.
 */
export function pathLossCurves(r_c: number, alpha_c: number, alpha: number, d_max: number, n: number): Float64Array;

export function variantNames(): string[];

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly aseCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly coverageCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly pathLossCurves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly variantNames: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
