/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const bs_curves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const model_samples: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const zeta_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
