// Deterministic random form documents for the fidelity tests. The shapes
// produced here follow the form endpoint's JSON exactly: six widget kinds,
// nested children, select options, and drill-down mappings between selects.

import type { ChoiceOption, DependsOn, FieldDoc, FormDoc, Widget } from "../src/types.js";

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export class Rng {
  private next: () => number;

  constructor(seed: number) {
    this.next = mulberry32(seed);
  }

  float(): number {
    return this.next();
  }

  int(lo: number, hi: number): number {
    return lo + Math.floor(this.next() * (hi - lo + 1));
  }

  bool(p = 0.5): boolean {
    return this.next() < p;
  }

  pick<T>(items: readonly T[]): T {
    return items[this.int(0, items.length - 1)];
  }

  /** Random subset, possibly empty. */
  subset<T>(items: readonly T[], keep = 0.5): T[] {
    return items.filter(() => this.bool(keep));
  }
}

const WORDS = [
  "outcome", "method", "setting", "cohort", "signal", "burden", "window",
  "source", "design", "metric", "domain", "species", "dosage", "region",
  "context", "quality", "followup", "strand", "onset", "gradient",
];

const SIMPLE_WIDGETS: Widget[] = ["text_input", "number_input", "checkbox", "date_input"];

interface GenState {
  rng: Rng;
  used: Set<string>;
  /** Select fields generated so far, in walk order; dependency candidates. */
  selects: FieldDoc[];
}

function freshName(state: GenState): string {
  for (;;) {
    const base = state.rng.pick(WORDS);
    const name = state.used.has(base) ? `${base}_${state.rng.int(2, 99)}` : base;
    if (!state.used.has(name)) {
      state.used.add(name);
      return name;
    }
  }
}

function title(name: string): string {
  return name.replace(/_/g, " ").replace(/^./, (c) => c.toUpperCase());
}

function genOptions(state: GenState, element: string): ChoiceOption[] {
  const n = state.rng.int(2, 6);
  const seen = new Set<string>();
  const out: ChoiceOption[] = [];
  while (out.length < n) {
    const value = `${state.rng.pick(WORDS)} ${state.rng.int(1, 9)}`;
    if (seen.has(value)) continue;
    seen.add(value);
    out.push({ id: `${element}.choice.${value.replace(/ /g, "_")}`, value });
  }
  return out;
}

function genDependsOn(state: GenState, options: ChoiceOption[]): DependsOn | null {
  if (!state.selects.length || !state.rng.bool(0.45)) return null;
  const parent = state.rng.pick(state.selects);
  const mapping: Record<string, string[]> = {};
  const childValues = options.map((o) => o.value);
  for (const opt of parent.options ?? []) {
    // Some parent values stay unmapped on purpose; the form must then
    // offer no child options for them.
    if (state.rng.bool(0.8)) {
      mapping[opt.value] = state.rng.subset(childValues, 0.55);
    }
  }
  return { parent: parent.element, mapping };
}

function genField(state: GenState, depth: number): FieldDoc {
  const name = freshName(state);
  const element = `category.${name}`;
  const rng = state.rng;
  const kind = rng.int(0, 9);

  let widget: Widget;
  let constraints: Record<string, unknown> = {};
  let options: ChoiceOption[] | null = null;
  let allowsAdditions = false;
  let dependsOn: DependsOn | null = null;

  if (kind < 4) {
    widget = rng.pick(SIMPLE_WIDGETS);
    if (widget === "text_input") {
      constraints = { value_type: "text" };
      if (rng.bool(0.5)) constraints["max_length"] = rng.int(10, 200);
      if (rng.bool(0.2)) constraints["pattern"] = "[a-z]+";
    } else if (widget === "number_input") {
      const valueType = rng.bool() ? "int" : "real";
      constraints = { value_type: valueType };
      if (rng.bool(0.6)) {
        const lo = rng.int(0, 50);
        constraints["range"] = [lo, lo + rng.int(1, 500)];
      }
    } else if (widget === "checkbox") {
      constraints = { value_type: "bool" };
    } else {
      constraints = { value_type: "date" };
    }
  } else if (kind < 8) {
    widget = "single_select";
    options = genOptions(state, element);
    dependsOn = genDependsOn(state, options);
  } else {
    widget = "dynamic_select";
    options = genOptions(state, element);
    allowsAdditions = true;
    dependsOn = genDependsOn(state, options);
  }

  const field: FieldDoc = {
    element,
    name,
    title: title(name),
    widget,
    mandatory: rng.bool(0.3),
    multiplicity: rng.bool(0.6) ? 1 : rng.bool(0.5) ? 0 : rng.int(2, 5),
    constraints,
    options,
    allows_additions: allowsAdditions,
    depends_on: dependsOn,
    children: [],
  };
  if (options) state.selects.push(field);

  if (depth < 3) {
    const kids = rng.bool(0.35) ? rng.int(1, depth === 1 ? 3 : 2) : 0;
    for (let i = 0; i < kids; i++) field.children.push(genField(state, depth + 1));
  }
  return field;
}

export function genDescriptor(seed: number): FormDoc {
  const state: GenState = { rng: new Rng(seed * 7919 + 17), used: new Set(), selects: [] };
  const n = state.rng.int(2, 7);
  const fields: FieldDoc[] = [];
  for (let i = 0; i < n; i++) fields.push(genField(state, 1));
  return { version: state.rng.int(1, 9), fields };
}

export function* walkDoc(fields: FieldDoc[]): Generator<FieldDoc> {
  for (const field of fields) {
    yield field;
    yield* walkDoc(field.children);
  }
}
