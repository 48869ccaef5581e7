/* tslint:disable */
/* eslint-disable */

/**
 * Decoupled A1 curves for both boundary conditions over a wavelength range.
 */
export class Dispersion {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly cutoff_open_ghz: number;
    readonly cutoff_short_ghz: number;
    readonly f_open_ghz: Float64Array;
    readonly f_short_ghz: Float64Array;
    readonly lambda_um: Float64Array;
    readonly vg_open: Float64Array;
}

/**
 * Insertion loss and group delay of a synthesized delay line.
 */
export class Passband {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Group delay in ns; NaN where undefined.
     */
    readonly delay_ns: Float64Array;
    readonly f_center_ghz: number;
    readonly f_ghz: Float64Array;
    readonly il_db: Float64Array;
}

export function a1_dispersion(thickness_um: number, lambda_min_um: number, lambda_max_um: number, points: number): Dispersion;

/**
 * Center frequency in GHz for each cell length; NaN where no design exists.
 */
export function center_sweep(lambda_min_um: number, lambda_max_um: number, n_cells: number, points: number): Float64Array;

export function passband(lambda_um: number, n_cells: number, gap_um: number, gamma_tt: number, pl_db_per_us: number, f_start_ghz: number, f_stop_ghz: number, points: number): Passband;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_dispersion_free: (a: number, b: number) => void;
    readonly __wbg_passband_free: (a: number, b: number) => void;
    readonly a1_dispersion: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly center_sweep: (a: number, b: number, c: number, d: number) => [number, number];
    readonly dispersion_cutoff_open_ghz: (a: number) => number;
    readonly dispersion_cutoff_short_ghz: (a: number) => number;
    readonly dispersion_f_open_ghz: (a: number) => [number, number];
    readonly dispersion_f_short_ghz: (a: number) => [number, number];
    readonly dispersion_lambda_um: (a: number) => [number, number];
    readonly dispersion_vg_open: (a: number) => [number, number];
    readonly passband: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly passband_delay_ns: (a: number) => [number, number];
    readonly passband_f_center_ghz: (a: number) => number;
    readonly passband_f_ghz: (a: number) => [number, number];
    readonly passband_il_db: (a: number) => [number, number];
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
