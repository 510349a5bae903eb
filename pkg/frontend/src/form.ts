// View model for the classification form.
//
// The server's form document is the single source of truth: every control
// kind, constraint, option list, and dependency mapping shown on screen is
// read from the document, never recomputed. The view model adds only what
// rendering needs on top of it: current values, per-field messages, and the
// drill-down filtering state that follows from those values.

import type {
  ChoiceOption,
  FieldDoc,
  FormDoc,
  StoredRecord,
  Violation,
  Widget,
} from "./types.js";

export type Scalar = string | number | boolean | null;

/** Values of an element that is no longer part of the live form. */
export interface RetiredGroup {
  element: string;
  values: Scalar[];
}

export class FieldVM {
  readonly children: FieldVM[];
  /** Live option list; grows when a dynamic choice is confirmed. */
  options: ChoiceOption[] | null;
  values: Scalar[];
  messages: string[] = [];

  constructor(
    readonly doc: FieldDoc,
    private readonly form: FormViewModel,
  ) {
    this.options = doc.options ? doc.options.slice() : null;
    this.values = [null];
    this.children = doc.children.map((c) => new FieldVM(c, form));
  }

  get element(): string {
    return this.doc.element;
  }

  get control(): Widget {
    return this.doc.widget;
  }

  get title(): string {
    return this.doc.title;
  }

  get mandatory(): boolean {
    return this.doc.mandatory;
  }

  /** 0 means unlimited. */
  get multiplicity(): number {
    return this.doc.multiplicity;
  }

  get constraints(): Record<string, unknown> {
    return this.doc.constraints;
  }

  get allowsAdditions(): boolean {
    return this.doc.allows_additions;
  }

  // -- repeatable rows -----------------------------------------------

  canAddRow(): boolean {
    return this.multiplicity === 0 || this.values.length < this.multiplicity;
  }

  addRow(): boolean {
    if (!this.canAddRow()) return false;
    this.values.push(null);
    return true;
  }

  removeRow(index: number): void {
    if (this.values.length <= 1) {
      this.values[0] = null;
      return;
    }
    this.values.splice(index, 1);
  }

  setValue(index: number, value: Scalar): void {
    this.values[index] = value;
    this.form.pruneDependents(this);
  }

  filled(): Scalar[] {
    return this.values.filter((v) => v !== null && v !== "");
  }

  // -- drill-down ----------------------------------------------------

  parentField(): FieldVM | null {
    if (!this.doc.depends_on) return null;
    return this.form.byElement.get(this.doc.depends_on.parent) ?? null;
  }

  /** Dependent fields stay inert until the parent holds a value. */
  disabled(): boolean {
    const parent = this.parentField();
    if (!parent) return false;
    return parent.filled().length === 0;
  }

  /**
   * Options the current parent selection allows. Without a dependency this
   * is the full option list; with one, the union of the mapped subsets for
   * every chosen parent value, in document order.
   */
  allowedOptions(): ChoiceOption[] {
    if (!this.options) return [];
    const dep = this.doc.depends_on;
    if (!dep) return this.options;
    const parent = this.parentField();
    if (!parent) return this.options;
    const allowed = new Set<string>();
    for (const value of parent.filled()) {
      for (const v of dep.mapping[String(value)] ?? []) allowed.add(v);
    }
    return this.options.filter((o) => allowed.has(o.value));
  }

  /** True when a stored value points at a deactivated choice. */
  isRetiredValue(index: number): boolean {
    if (!this.options) return false;
    const value = this.values[index];
    if (value === null || value === "") return false;
    return !this.options.some((o) => o.value === value);
  }

  /** Replace the option list after the server confirmed a new choice. */
  setOptions(options: ChoiceOption[]): void {
    this.options = options.slice();
  }

  *walk(): Generator<FieldVM> {
    yield this;
    for (const child of this.children) yield* child.walk();
  }
}

export class FormViewModel {
  readonly fields: FieldVM[];
  readonly byElement = new Map<string, FieldVM>();
  readonly retired: RetiredGroup[] = [];
  recordVersion: number | null = null;
  completeness: string | null = null;

  constructor(
    readonly doc: FormDoc,
    record: StoredRecord | null = null,
  ) {
    this.fields = doc.fields.map((f) => new FieldVM(f, this));
    for (const field of this.walk()) this.byElement.set(field.element, field);
    if (record) this.loadRecord(record);
  }

  get version(): number {
    return this.doc.version;
  }

  *walk(): Generator<FieldVM> {
    for (const field of this.fields) yield* field.walk();
  }

  private loadRecord(record: StoredRecord): void {
    this.recordVersion = record.record_version;
    const payload = record.payload as { values?: Record<string, Scalar[]>; completeness?: string };
    this.completeness = payload.completeness ?? null;
    for (const [element, values] of Object.entries(payload.values ?? {})) {
      const field = this.byElement.get(element);
      if (!field) {
        // The category was removed from the model after this record was
        // written; keep the values visible but read-only.
        this.retired.push({ element, values: values.slice() });
        continue;
      }
      if (values.length) field.values = values.slice();
    }
  }

  /** Drop dependent values the new parent selection no longer allows. */
  pruneDependents(parent: FieldVM): void {
    for (const field of this.walk()) {
      if (field.doc.depends_on?.parent !== parent.element) continue;
      const allowed = new Set(field.allowedOptions().map((o) => o.value));
      let changed = false;
      field.values = field.values.map((v) => {
        if (v === null || v === "" || allowed.has(String(v))) return v;
        changed = true;
        return null;
      });
      if (changed) this.pruneDependents(field);
    }
  }

  /** Payload for the save endpoint: only rows that hold a value. */
  values(): Record<string, Scalar[]> {
    const out: Record<string, Scalar[]> = {};
    for (const field of this.walk()) {
      const filled = field.filled();
      if (filled.length) out[field.element] = filled;
    }
    return out;
  }

  /**
   * Client-side pre-check before a save. The server remains the authority;
   * this only catches what is certain without it: missing mandatory values
   * on completion, row counts over the multiplicity, and dependent values
   * outside the mapped subset.
   */
  check(markComplete: boolean): boolean {
    let ok = true;
    for (const field of this.walk()) {
      field.messages = [];
      const filled = field.filled();
      if (markComplete && field.mandatory && filled.length === 0) {
        field.messages.push(`${field.title} is required to mark the paper complete`);
        ok = false;
      }
      if (field.multiplicity !== 0 && filled.length > field.multiplicity) {
        field.messages.push(`${field.title} allows at most ${field.multiplicity} values`);
        ok = false;
      }
      if (field.doc.depends_on && filled.length) {
        const allowed = new Set(field.allowedOptions().map((o) => o.value));
        for (const value of filled) {
          if (!allowed.has(String(value))) {
            field.messages.push(`${value} is not allowed for the current parent selection`);
            ok = false;
          }
        }
      }
    }
    return ok;
  }

  /** Attach server-reported violations to their fields. */
  applyViolations(violations: Violation[]): void {
    for (const field of this.walk()) field.messages = [];
    for (const v of violations) {
      const field = this.byElement.get(v.element);
      if (field) field.messages.push(v.message);
    }
  }
}
