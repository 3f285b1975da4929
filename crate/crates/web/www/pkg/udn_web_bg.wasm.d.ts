/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const aseCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const coverageCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const pathLossCurves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const variantNames: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
