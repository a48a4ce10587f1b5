/* tslint:disable */
/* eslint-disable */

export class Constant {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly argmaxT: number;
    /**
     * `C >= 1 + k²`
     */
    readonly iclRecovers: boolean;
    /**
     * `C >= 1`
     */
    readonly mlRecovers: boolean;
    readonly value: number;
}

export class FitDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Edge endpoints, flattened as `i0, j0, i1, j1, ...` (0-based).
     */
    readonly edges: Uint32Array;
    readonly estimate: Uint32Array;
    readonly misclassified: number;
    readonly n: number;
    readonly nmi: number;
    readonly objectiveValue: number;
    readonly truth: Uint32Array;
}

export function phaseConstant(k: number, s1: number, s2: number): Constant;

export function sampleAndFit(n: number, k: number, s1: number, s2: number, c: number, icl: boolean, seed: bigint): FitDemo;

export function separationCurve(n: number, k: number, reps: number, seed: bigint): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_constant_free: (a: number, b: number) => void;
    readonly __wbg_fitdemo_free: (a: number, b: number) => void;
    readonly constant_argmaxT: (a: number) => number;
    readonly constant_iclRecovers: (a: number) => number;
    readonly constant_mlRecovers: (a: number) => number;
    readonly constant_value: (a: number) => number;
    readonly fitdemo_edges: (a: number) => [number, number];
    readonly fitdemo_estimate: (a: number) => [number, number];
    readonly fitdemo_misclassified: (a: number) => number;
    readonly fitdemo_n: (a: number) => number;
    readonly fitdemo_truth: (a: number) => [number, number];
    readonly phaseConstant: (a: number, b: number, c: number) => [number, number, number];
    readonly sampleAndFit: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number];
    readonly separationCurve: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly fitdemo_nmi: (a: number) => number;
    readonly fitdemo_objectiveValue: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
