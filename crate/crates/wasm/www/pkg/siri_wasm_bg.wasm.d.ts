/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_analysis_free: (a: number, b: number) => void;
export const __wbg_get_analysis_endemic: (a: number) => number;
export const __wbg_get_analysis_i_star: (a: number) => number;
export const __wbg_get_analysis_k: (a: number) => number;
export const __wbg_get_analysis_r0: (a: number) => number;
export const __wbg_get_analysis_r_star: (a: number) => number;
export const __wbg_get_analysis_s0: (a: number) => number;
export const __wbg_get_analysis_s_star: (a: number) => number;
export const __wbg_scenario_free: (a: number, b: number) => void;
export const __wbg_set_analysis_endemic: (a: number, b: number) => void;
export const __wbg_set_analysis_i_star: (a: number, b: number) => void;
export const __wbg_set_analysis_k: (a: number, b: number) => void;
export const __wbg_set_analysis_r0: (a: number, b: number) => void;
export const __wbg_set_analysis_r_star: (a: number, b: number) => void;
export const __wbg_set_analysis_s0: (a: number, b: number) => void;
export const __wbg_set_analysis_s_star: (a: number, b: number) => void;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const __wbg_sweep_free: (a: number, b: number) => void;
export const scenario_analyze: (a: number) => [number, number, number];
export const scenario_get: (a: number, b: number, c: number) => [number, number, number];
export const scenario_new: (a: number, b: number) => [number, number, number];
export const scenario_set: (a: number, b: number, c: number, d: number) => [number, number];
export const scenario_set_incidence: (a: number, b: number, c: number) => [number, number];
export const scenario_set_kernel: (a: number, b: number, c: number) => [number, number];
export const scenario_simulate: (a: number) => [number, number, number];
export const scenario_sweep: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const simulation_certificate: (a: number) => [number, number];
export const simulation_certificate_name: (a: number) => [number, number];
export const simulation_exit_code: (a: number) => number;
export const simulation_i: (a: number) => [number, number];
export const simulation_monitor_violations: (a: number) => number;
export const simulation_monotone: (a: number) => number;
export const simulation_r: (a: number) => [number, number];
export const simulation_s: (a: number) => [number, number];
export const simulation_t: (a: number) => [number, number];
export const sweep_i_star: (a: number) => [number, number];
export const sweep_r0: (a: number) => [number, number];
export const sweep_values: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
