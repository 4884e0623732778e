/* tslint:disable */
/* eslint-disable */

/**
 * Weighted sup errors of the max-product series at `w = w_min · 2^j`,
 * `j < doublings`, on `log x ∈ [-2, 2]`.
 */
export function convergence(kernel: string, _function: string, w_min: number, doublings: number): string;

/**
 * Log-domain profile `χ(e^t)` of a kernel with its moments `m_0, m_1, m_2` and η.
 */
export function kernel_profile(kernel: string, t_min: number, t_max: number, points: number): string;

/**
 * Kernel and function registry names.
 */
export function names(): string;

/**
 * Operator `op` (`S`, `I`, `MG`, `E`) applied to `function` at rate `w`,
 * on a uniform grid of `log x`.
 */
export function reconstruct(op: string, kernel: string, _function: string, w: number, log_min: number, log_max: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly convergence: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly kernel_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly names: () => [number, number];
    readonly reconstruct: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
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
