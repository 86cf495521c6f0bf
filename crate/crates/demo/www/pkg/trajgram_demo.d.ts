/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    instants(): number;
    /**
     * `[id, distance, ...]` for the `k` objects nearest `(x, y)` at `t`.
     */
    knn(x: number, y: number, t: number, k: number): Float64Array;
    /**
     * `kind` is `walks`, `routes`, `events` or `walkthrough`; the last
     * ignores the size arguments.
     */
    constructor(kind: string, seed: number, objects: number, instants: number, side: number, period: number);
    side(): number;
    /**
     * One `name: value` line per size statistic.
     */
    summary(): string;
    /**
     * `[id, x, y, ...]` for the objects inside the rectangle at `t`.
     */
    time_slice(x1: number, y1: number, x2: number, y2: number, t: number): Int32Array;
    /**
     * `[t, x, y, ...]` for object `id` over `[t_begin, t_end]`.
     */
    trajectory(id: number, t_begin: number, t_end: number): Int32Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_instants: (a: number) => number;
    readonly demo_knn: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly demo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly demo_side: (a: number) => number;
    readonly demo_summary: (a: number) => [number, number];
    readonly demo_time_slice: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly demo_trajectory: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
