/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_constant_free: (a: number, b: number) => void;
export const __wbg_fitdemo_free: (a: number, b: number) => void;
export const constant_argmaxT: (a: number) => number;
export const constant_iclRecovers: (a: number) => number;
export const constant_mlRecovers: (a: number) => number;
export const constant_value: (a: number) => number;
export const fitdemo_edges: (a: number) => [number, number];
export const fitdemo_estimate: (a: number) => [number, number];
export const fitdemo_misclassified: (a: number) => number;
export const fitdemo_n: (a: number) => number;
export const fitdemo_truth: (a: number) => [number, number];
export const phaseConstant: (a: number, b: number, c: number) => [number, number, number];
export const sampleAndFit: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number];
export const separationCurve: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
export const fitdemo_nmi: (a: number) => number;
export const fitdemo_objectiveValue: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
