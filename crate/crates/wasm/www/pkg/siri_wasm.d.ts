/* tslint:disable */
/* eslint-disable */

export class Analysis {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    endemic: boolean;
    i_star: number;
    k: number;
    r0: number;
    r_star: number;
    s0: number;
    /**
     * NaN when there is no endemic equilibrium.
     */
    s_star: number;
}

/**
 * A mutable scenario, starting from one of the built-in presets.
 */
export class Scenario {
    free(): void;
    [Symbol.dispose](): void;
    analyze(): Analysis;
    get(key: string): number;
    constructor(preset: string);
    /**
     * Sets a model parameter (`lambda`, `mu`, `gamma`, `c`, `beta`, `delta`),
     * `h`, `saturation`, `t_end` or `step`.
     */
    set(key: string, value: number): void;
    /**
     * `bilinear` or `saturated`.
     */
    set_incidence(family: string): void;
    /**
     * `truncated-exponential` or `uniform`.
     */
    set_kernel(family: string): void;
    simulate(): Simulation;
    /**
     * Equilibrium analysis for each of `values` assigned to `param`.
     */
    sweep(param: string, values: Float64Array): Sweep;
}

export class Simulation {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Certificate values, NaN where not evaluated; empty when disabled.
     */
    certificate(): Float64Array;
    certificate_name(): string;
    exit_code(): number;
    i(): Float64Array;
    monitor_violations(): number;
    monotone(): boolean;
    r(): Float64Array;
    s(): Float64Array;
    t(): Float64Array;
}

export class Sweep {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Endemic infective level, 0 where R0 <= 1.
     */
    i_star(): Float64Array;
    r0(): Float64Array;
    values(): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_analysis_free: (a: number, b: number) => void;
    readonly __wbg_get_analysis_endemic: (a: number) => number;
    readonly __wbg_get_analysis_i_star: (a: number) => number;
    readonly __wbg_get_analysis_k: (a: number) => number;
    readonly __wbg_get_analysis_r0: (a: number) => number;
    readonly __wbg_get_analysis_r_star: (a: number) => number;
    readonly __wbg_get_analysis_s0: (a: number) => number;
    readonly __wbg_get_analysis_s_star: (a: number) => number;
    readonly __wbg_scenario_free: (a: number, b: number) => void;
    readonly __wbg_set_analysis_endemic: (a: number, b: number) => void;
    readonly __wbg_set_analysis_i_star: (a: number, b: number) => void;
    readonly __wbg_set_analysis_k: (a: number, b: number) => void;
    readonly __wbg_set_analysis_r0: (a: number, b: number) => void;
    readonly __wbg_set_analysis_r_star: (a: number, b: number) => void;
    readonly __wbg_set_analysis_s0: (a: number, b: number) => void;
    readonly __wbg_set_analysis_s_star: (a: number, b: number) => void;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly __wbg_sweep_free: (a: number, b: number) => void;
    readonly scenario_analyze: (a: number) => [number, number, number];
    readonly scenario_get: (a: number, b: number, c: number) => [number, number, number];
    readonly scenario_new: (a: number, b: number) => [number, number, number];
    readonly scenario_set: (a: number, b: number, c: number, d: number) => [number, number];
    readonly scenario_set_incidence: (a: number, b: number, c: number) => [number, number];
    readonly scenario_set_kernel: (a: number, b: number, c: number) => [number, number];
    readonly scenario_simulate: (a: number) => [number, number, number];
    readonly scenario_sweep: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly simulation_certificate: (a: number) => [number, number];
    readonly simulation_certificate_name: (a: number) => [number, number];
    readonly simulation_exit_code: (a: number) => number;
    readonly simulation_i: (a: number) => [number, number];
    readonly simulation_monitor_violations: (a: number) => number;
    readonly simulation_monotone: (a: number) => number;
    readonly simulation_r: (a: number) => [number, number];
    readonly simulation_s: (a: number) => [number, number];
    readonly simulation_t: (a: number) => [number, number];
    readonly sweep_i_star: (a: number) => [number, number];
    readonly sweep_r0: (a: number) => [number, number];
    readonly sweep_values: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
