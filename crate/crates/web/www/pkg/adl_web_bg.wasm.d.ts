/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_dispersion_free: (a: number, b: number) => void;
export const __wbg_passband_free: (a: number, b: number) => void;
export const a1_dispersion: (a: number, b: number, c: number, d: number) => [number, number, number];
export const center_sweep: (a: number, b: number, c: number, d: number) => [number, number];
export const dispersion_cutoff_open_ghz: (a: number) => number;
export const dispersion_cutoff_short_ghz: (a: number) => number;
export const dispersion_f_open_ghz: (a: number) => [number, number];
export const dispersion_f_short_ghz: (a: number) => [number, number];
export const dispersion_lambda_um: (a: number) => [number, number];
export const dispersion_vg_open: (a: number) => [number, number];
export const passband: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const passband_delay_ns: (a: number) => [number, number];
export const passband_f_center_ghz: (a: number) => number;
export const passband_f_ghz: (a: number) => [number, number];
export const passband_il_db: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
