/* tslint:disable */
/* eslint-disable */

/**
 * Gender and ethnic bias of a batch described by label counts. Gender
 * labels and ethnicity labels are paired up in order; the shorter list is
 * padded with unknown labels.
 */
export function bias_scores(male: number, female: number, gender_unknown: number, arab: number, asian: number, black: number, white: number, ethnicity_unknown: number): string;

/**
 * Non-dominated subset and hypervolume of `points_json`, a JSON array of
 * `[x, y]` pairs, both minimized. The reference point is the worst value
 * per axis plus `epsilon`.
 */
export function front_hypervolume(points_json: string, epsilon: number): string;

/**
 * Names of the objectives the race frames plot, for axis labels.
 */
export function race_axes(): string;

/**
 * Runs NSGA-II and random search with the same seed on the default
 * synthetic landscape and returns the best-so-far front after every
 * generation (or iteration) of each.
 */
export function search_race(seed: number, images: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bias_scores: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly front_hypervolume: (a: number, b: number, c: number) => [number, number, number, number];
    readonly race_axes: () => [number, number];
    readonly search_race: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
