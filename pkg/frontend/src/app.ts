// Page wiring. Each panel owns one screen region and talks to the service
// through ApiClient only; nothing here bypasses the HTTP surface. Controls
// that a member's rank does not permit are not rendered at all, so the UI
// cannot emit a request the service would refuse on authorization grounds.

import { ApiClient, ApiFailure } from "./api.js";
import {
  barChartSvg,
  criterionSeries,
  distributionSeries,
  type Series,
} from "./dashboard.js";
import { pieChartSvg } from "./dashboard.js";
import { clear, el } from "./dom.js";
import { EditorState } from "./editor.js";
import { FieldVM, FormViewModel } from "./form.js";
import { ScreeningQueue } from "./queue.js";
import type {
  PaperPayload,
  PhaseInfo,
  PhaseStats,
  ProjectInfo,
  QueueItem,
  SchemaDoc,
} from "./types.js";

const RANKS = ["reviewer", "senior", "admin"] as const;
export type Rank = (typeof RANKS)[number];

export function atLeast(rank: Rank, needed: Rank): boolean {
  return RANKS.indexOf(rank) >= RANKS.indexOf(needed);
}

function failureMessage(err: unknown): string {
  if (err instanceof ApiFailure) return `${err.code}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

// -- model editor ----------------------------------------------------

export class EditorPanel {
  readonly state = new EditorState();
  /** Debounce for the background dry-run; tests set this to 0. */
  debounceMs = 400;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private root: HTMLElement | null = null;
  private textarea: HTMLTextAreaElement | null = null;
  busy = false;
  notice = "";

  constructor(
    private api: ApiClient,
    private project: string | null,
    initialVersion: number | null,
    private onInstalled?: (version: number) => void,
  ) {
    this.state.lastInstalledVersion = initialVersion;
  }

  mount(root: HTMLElement): void {
    this.root = root;
    this.render();
  }

  setSource(source: string): void {
    this.state.edit(source);
    if (this.textarea) this.textarea.value = source;
    this.schedulePreview();
    this.sync();
  }

  private schedulePreview(): void {
    if (this.state.fresh) return; // nothing to diff against yet
    if (this.timer) clearTimeout(this.timer);
    this.timer = setTimeout(() => void this.runPreview(), this.debounceMs);
  }

  /** Dry-run install: doubles as the validator and the diff preview. */
  async runPreview(): Promise<void> {
    if (this.timer) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (!this.project || this.state.fresh) return;
    this.busy = true;
    try {
      const result = await this.api.install(this.project, this.state.source, {
        dryRun: true,
        baseVersion: this.state.lastInstalledVersion,
      });
      this.state.setDiagnostics([]);
      this.state.recordPreview(result.report);
      this.notice = "";
    } catch (err) {
      if (err instanceof ApiFailure && err.diagnostics.length) {
        this.state.setDiagnostics(err.diagnostics);
        const line = this.state.firstErrorLine();
        if (line !== null) this.jumpTo(line);
      } else {
        this.notice = failureMessage(err);
      }
    } finally {
      this.busy = false;
      this.sync();
    }
  }

  async confirmInstall(): Promise<void> {
    if (!this.state.canConfirm) return;
    this.busy = true;
    this.sync();
    try {
      if (this.project) {
        const result = await this.api.install(this.project, this.state.source, {
          baseVersion: this.state.lastInstalledVersion,
        });
        this.state.recordInstall(result.version);
        this.notice = `installed version ${result.version}`;
        this.onInstalled?.(result.version);
      } else {
        const result = await this.api.createProject(this.state.source);
        this.project = result.project.name;
        this.state.recordInstall(result.version);
        this.notice = `created project ${result.project.name}`;
        this.onInstalled?.(result.version);
      }
    } catch (err) {
      if (err instanceof ApiFailure && err.diagnostics.length) {
        this.state.setDiagnostics(err.diagnostics);
      } else {
        this.notice = failureMessage(err);
      }
    } finally {
      this.busy = false;
      this.sync();
    }
  }

  /** Move the caret to the start of a source line. */
  jumpTo(line: number): void {
    const ta = this.textarea;
    if (!ta) return;
    const lines = this.state.source.split("\n");
    let offset = 0;
    for (let i = 0; i < line - 1 && i < lines.length; i++) offset += lines[i].length + 1;
    ta.focus();
    ta.setSelectionRange(offset, offset + (lines[line - 1]?.length ?? 0));
  }

  private render(): void {
    if (!this.root) return;
    clear(this.root);
    this.textarea = el("textarea", {
      class: "model-source",
      rows: "18",
      spellcheck: "false",
      oninput: () => this.setSource(this.textarea!.value),
    });
    this.textarea.value = this.state.source;
    this.root.append(
      el(
        "div",
        { class: "editor-toolbar" },
        el("button", { id: "btn-preview", onclick: () => void this.runPreview() }, "Preview changes"),
        el(
          "button",
          { id: "btn-install", onclick: () => void this.confirmInstall() },
          this.state.fresh ? "Create project" : "Install",
        ),
        el("span", { class: "version-badge" }),
        el("span", { class: "editor-notice" }),
      ),
      this.textarea,
      el("ul", { class: "diagnostics" }),
      el("div", { class: "plan" }),
    );
    this.sync();
  }

  private sync(): void {
    const root = this.root;
    if (!root) return;
    const badge = root.querySelector(".version-badge") as HTMLElement;
    badge.textContent = this.state.fresh ? "unsaved" : `v${this.state.lastInstalledVersion}`;

    const preview = root.querySelector("#btn-preview") as HTMLButtonElement;
    preview.disabled = this.busy || this.state.fresh || this.state.source.trim() === "";

    const install = root.querySelector("#btn-install") as HTMLButtonElement;
    install.disabled = this.busy || !this.state.canConfirm;

    const notice = root.querySelector(".editor-notice") as HTMLElement;
    if (this.state.errors.length) {
      notice.textContent = `${this.state.errors.length} error(s) block the install`;
    } else if (this.state.noChanges) {
      notice.textContent = "no changes";
    } else if (!this.state.fresh && !this.state.previewCurrent) {
      notice.textContent = "preview required before install";
    } else {
      notice.textContent = this.notice;
    }

    const list = root.querySelector(".diagnostics") as HTMLElement;
    clear(list);
    for (const d of this.state.diagnostics) {
      list.append(
        el(
          "li",
          {
            class: `diag-row diag-${d.severity}`,
            "data-line": String(d.line),
            onclick: () => this.jumpTo(d.line),
          },
          `line ${d.line}, col ${d.column}: ${d.code} ${d.message}`,
        ),
      );
    }

    const plan = root.querySelector(".plan") as HTMLElement;
    clear(plan);
    if (this.state.previewCurrent) {
      const ops = this.state.preview!.ops;
      plan.append(el("h3", {}, ops.length ? "Planned operations" : "No changes"));
      for (const op of ops) {
        plan.append(
          el(
            "div",
            { class: `plan-op plan-${op.op}` },
            el("span", { class: "op-kind" }, op.op),
            el("span", { class: "op-id" }, op.id),
            el("span", { class: "op-reason" }, op.reason),
          ),
        );
      }
    }
  }
}

// -- screening -------------------------------------------------------

export interface CriterionRef {
  id: string;
  text: string;
}

export function activeCriteria(schema: SchemaDoc): CriterionRef[] {
  return schema.elements
    .filter((e) => e.kind === "criterion" && e.status === "active")
    .map((e) => ({ id: e.id, text: String(e.descriptor["text"] ?? e.id) }));
}

export class QueuePanel {
  readonly queue = new ScreeningQueue();
  error = "";
  private root: HTMLElement | null = null;

  constructor(
    private api: ApiClient,
    private project: string,
    private phase: PhaseInfo,
    private criteria: CriterionRef[],
    private onDecided?: () => void,
  ) {}

  async load(): Promise<void> {
    const res = await this.api.queue(this.project, this.phase.name);
    this.queue.load(res.queue);
    this.render();
  }

  mount(root: HTMLElement): void {
    this.root = root;
    this.render();
  }

  async submit(): Promise<void> {
    if (!this.queue.canSubmit) {
      this.render();
      return;
    }
    const item = this.queue.current!;
    const draft = { ...this.queue.draft };
    // Queue advancement is the one optimistic update; everything else in
    // the app waits for the server before touching local state.
    this.queue.advance();
    this.error = "";
    this.render();
    try {
      await this.api.decide(
        item.assignment.ref,
        draft.verdict!,
        draft.criterion,
        draft.note || null,
      );
      this.onDecided?.();
    } catch (err) {
      this.queue.restore(item);
      this.queue.draft = draft;
      this.error = failureMessage(err);
      this.render();
    }
  }

  render(): void {
    const root = this.root;
    if (!root) return;
    clear(root);
    const item = this.queue.current;
    root.append(
      el(
        "div",
        { class: "queue-header" },
        el("strong", {}, this.phase.name),
        el("span", { class: "queue-badge" }, String(this.queue.count)),
        this.error ? el("span", { class: "queue-error" }, this.error) : null,
      ),
    );
    if (!item) {
      root.append(el("p", { class: "queue-empty" }, "Nothing pending in this phase."));
      return;
    }
    root.append(this.paperCard(item), this.decisionForm());
  }

  private paperCard(item: QueueItem): HTMLElement {
    const paper = (item.paper?.payload ?? {}) as Partial<PaperPayload>;
    const card = el(
      "div",
      { class: "paper-card" },
      el("h3", { class: "paper-title" }, paper.title ?? "(untitled)"),
      el(
        "p",
        { class: "paper-meta" },
        [paper.authors?.join(", "), paper.venue, paper.year ? String(paper.year) : null]
          .filter(Boolean)
          .join(" · "),
      ),
    );
    // Evidence level decides how much of the paper is on screen.
    if (this.phase.evidence !== "metadata") {
      card.append(
        el("p", { class: "paper-abstract" }, paper.abstract ?? "(no abstract on file)"),
      );
    }
    if (this.phase.evidence === "fulltext") {
      card.append(
        paper.link
          ? el(
              "a",
              { class: "paper-link", href: paper.link, target: "_blank", rel: "noopener" },
              "open full text",
            )
          : el("span", { class: "paper-link-missing" }, "no full text link"),
      );
    }
    return card;
  }

  private decisionForm(): HTMLElement {
    const { draft } = this.queue;
    const form = el(
      "div",
      { class: "decision-form" },
      el(
        "div",
        { class: "verdict-buttons" },
        el(
          "button",
          {
            id: "btn-include",
            class: draft.verdict === "include" ? "chosen" : "",
            onclick: () => {
              this.queue.chooseVerdict("include");
              this.render();
            },
          },
          "Include",
        ),
        el(
          "button",
          {
            id: "btn-exclude",
            class: draft.verdict === "exclude" ? "chosen" : "",
            onclick: () => {
              this.queue.chooseVerdict("exclude");
              this.render();
            },
          },
          "Exclude",
        ),
      ),
    );
    if (draft.verdict === "exclude") {
      const select = el("select", {
        id: "criterion-select",
        onchange: () => {
          this.queue.chooseCriterion(select.value || null);
          this.render();
        },
      }) as HTMLSelectElement;
      select.append(el("option", { value: "" }, "choose a criterion"));
      for (const c of this.criteria) {
        const opt = el("option", { value: c.id }, c.text);
        if (draft.criterion === c.id) opt.setAttribute("selected", "");
        select.append(opt);
      }
      select.value = draft.criterion ?? "";
      form.append(el("label", { class: "criterion-label" }, "Criterion: ", select));
    }
    const note = el("input", {
      type: "text",
      class: "decision-note",
      placeholder: "note (optional)",
      oninput: () => (this.queue.draft.note = note.value),
    }) as HTMLInputElement;
    note.value = draft.note;
    const submit = el(
      "button",
      { id: "btn-submit-decision", onclick: () => void this.submit() },
      "Submit decision",
    ) as HTMLButtonElement;
    submit.disabled = !this.queue.canSubmit;
    form.append(note, submit);
    const reason = this.queue.blockReason;
    if (reason) form.append(el("p", { class: "block-reason" }, reason));
    return form;
  }
}

// -- conflicts -------------------------------------------------------

export class ConflictPanel {
  private root: HTMLElement | null = null;
  cases: { paper: string; verdicts: string[] }[] = [];
  resolvedNote = "";

  constructor(
    private api: ApiClient,
    private project: string,
    private phase: string,
    private canResolve: boolean,
  ) {}

  async load(): Promise<void> {
    const res = await this.api.conflicts(this.project, this.phase);
    this.cases = res.conflicts.map((c) => ({
      paper: String(c.case.paper_id ?? "?"),
      verdicts: c.verdicts.map(
        (v) => `${v.reviewer}: ${v.verdict}${v.criterion ? ` (${v.criterion})` : ""}`,
      ),
    }));
    this.render();
  }

  mount(root: HTMLElement): void {
    this.root = root;
    this.render();
  }

  private render(): void {
    const root = this.root;
    if (!root) return;
    clear(root);
    root.append(el("h3", {}, `Open conflicts: ${this.cases.length}`));
    for (const c of this.cases) {
      root.append(
        el(
          "div",
          { class: "conflict-case" },
          el("strong", {}, `paper #${c.paper}`),
          el("span", {}, c.verdicts.join("; ")),
        ),
      );
    }
    // Resolution applies the configured strategy server-side; only members
    // whose rank allows it ever see the button.
    if (this.canResolve && this.cases.length) {
      root.append(
        el(
          "button",
          {
            id: "btn-resolve",
            onclick: () =>
              void this.api.resolveConflicts(this.project, this.phase).then(() => this.load()),
          },
          "Apply resolution strategy",
        ),
      );
    }
    if (this.resolvedNote) root.append(el("p", {}, this.resolvedNote));
  }
}

// -- classification form ---------------------------------------------

export class FormPanel {
  vm: FormViewModel | null = null;
  staleConflict = false;
  notice = "";
  private root: HTMLElement | null = null;

  constructor(
    private api: ApiClient,
    private project: string,
    private paperId: number,
  ) {}

  async load(): Promise<void> {
    const [formRes, recordRes] = await Promise.all([
      this.api.form(this.project),
      this.api.classification(this.project, this.paperId),
    ]);
    this.vm = new FormViewModel(formRes.form, recordRes.record);
    this.staleConflict = false;
    this.render();
  }

  mount(root: HTMLElement): void {
    this.root = root;
    this.render();
  }

  async save(markComplete: boolean): Promise<void> {
    const vm = this.vm;
    if (!vm) return;
    if (!vm.check(markComplete)) {
      this.render();
      return;
    }
    try {
      const res = await this.api.saveClassification(
        this.project,
        this.paperId,
        vm.values(),
        markComplete,
        vm.recordVersion,
      );
      vm.recordVersion = res.record.record_version;
      vm.completeness = String(res.record.payload["completeness"] ?? "");
      this.notice = markComplete ? "marked complete" : "draft saved";
      this.render();
    } catch (err) {
      if (err instanceof ApiFailure && err.code === "E_VERSION_STALE") {
        // Someone else saved this record since we loaded it. Offer a
        // reload; silently overwriting would lose their work.
        this.staleConflict = true;
        this.render();
        return;
      }
      if (err instanceof ApiFailure && Array.isArray(err.details)) {
        vm.applyViolations(err.details as never[]);
        this.render();
        return;
      }
      this.notice = failureMessage(err);
      this.render();
    }
  }

  async addChoice(field: FieldVM, value: string): Promise<void> {
    if (!value.trim()) return;
    const res = await this.api.addChoice(this.project, field.element, value.trim());
    // The confirmed list comes back in full; the new choice is selectable
    // right away without reloading the form.
    field.setOptions(res.choices);
    this.render();
  }

  render(): void {
    const root = this.root;
    if (!root) return;
    clear(root);
    const vm = this.vm;
    if (!vm) {
      root.append(el("p", {}, "loading form..."));
      return;
    }
    if (this.staleConflict) {
      root.append(
        el(
          "div",
          { class: "stale-dialog" },
          el("p", {}, "This record changed on the server while you were editing."),
          el(
            "button",
            { id: "btn-reload-record", onclick: () => void this.load() },
            "Reload and retry",
          ),
        ),
      );
    }
    const header = el(
      "div",
      { class: "form-header" },
      el("strong", {}, `paper #${this.paperId}`),
      el("span", { class: "form-state" }, vm.completeness ?? "new"),
      this.notice ? el("span", { class: "form-notice" }, this.notice) : null,
    );
    const body = el("div", { class: "form-body" });
    for (const field of vm.fields) body.append(this.renderField(field));
    for (const group of vm.retired) {
      body.append(
        el(
          "div",
          { class: "field retired-group" },
          el("span", { class: "retired-badge" }, "retired"),
          el("span", {}, `${group.element}: ${group.values.join(", ")}`),
        ),
      );
    }
    root.append(
      header,
      body,
      el(
        "div",
        { class: "form-actions" },
        el("button", { id: "btn-save-draft", onclick: () => void this.save(false) }, "Save draft"),
        el("button", { id: "btn-complete", onclick: () => void this.save(true) }, "Mark complete"),
      ),
    );
  }

  renderField(field: FieldVM): HTMLElement {
    const box = el(
      "div",
      { class: "field", "data-element": field.element },
      el(
        "label",
        { class: "field-label" },
        field.title,
        field.mandatory ? el("span", { class: "mandatory-mark" }, "*") : null,
      ),
    );
    const disabled = field.disabled();
    if (disabled) box.classList.add("field-disabled");
    const rows = el("div", { class: "rows" });
    field.values.forEach((_, i) => rows.append(this.renderRow(field, i, disabled)));
    box.append(rows);
    if (field.multiplicity !== 1) {
      const add = el(
        "button",
        {
          class: "add-row",
          onclick: () => {
            field.addRow();
            this.render();
          },
        },
        "+ add value",
      ) as HTMLButtonElement;
      add.disabled = disabled || !field.canAddRow();
      box.append(add);
    }
    if (field.control === "dynamic_select" && field.allowsAdditions) {
      const input = el("input", {
        type: "text",
        class: "add-choice-input",
        placeholder: "new option",
      }) as HTMLInputElement;
      box.append(
        el(
          "div",
          { class: "add-choice" },
          input,
          el(
            "button",
            { class: "add-choice-btn", onclick: () => void this.addChoice(field, input.value) },
            "add option",
          ),
        ),
      );
    }
    for (const msg of field.messages) box.append(el("p", { class: "field-msg" }, msg));
    for (const child of field.children) {
      box.append(el("div", { class: "field-children" }, this.renderField(child)));
    }
    return box;
  }

  private renderRow(field: FieldVM, index: number, disabled: boolean): HTMLElement {
    const row = el("div", { class: "row" });
    const value = field.values[index];
    const retired = field.isRetiredValue(index);
    if (retired) {
      // A value whose choice was deactivated stays visible but frozen.
      row.append(
        el("span", { class: "retired-value" }, String(value)),
        el("span", { class: "retired-badge" }, "retired"),
      );
      return row;
    }
    row.append(this.renderControl(field, index, disabled));
    if (field.values.length > 1) {
      row.append(
        el(
          "button",
          {
            class: "remove-row",
            onclick: () => {
              field.removeRow(index);
              this.render();
            },
          },
          "remove",
        ),
      );
    }
    return row;
  }

  private renderControl(field: FieldVM, index: number, disabled: boolean): HTMLElement {
    const value = field.values[index];
    const set = (v: string | number | boolean | null) => {
      field.setValue(index, v);
      this.render();
    };
    switch (field.control) {
      case "single_select":
      case "dynamic_select": {
        const select = el("select", {
          class: "control",
          onchange: () => set(select.value || null),
        }) as HTMLSelectElement;
        select.append(el("option", { value: "" }, "(none)"));
        for (const opt of field.allowedOptions()) {
          select.append(el("option", { value: opt.value }, opt.value));
        }
        select.value = value === null ? "" : String(value);
        select.disabled = disabled;
        return select;
      }
      case "checkbox": {
        const input = el("input", {
          type: "checkbox",
          class: "control",
          onchange: () => set(input.checked),
        }) as HTMLInputElement;
        input.checked = value === true;
        input.disabled = disabled;
        return input;
      }
      case "number_input": {
        const input = el("input", {
          type: "number",
          class: "control",
          onchange: () => {
            if (input.value === "") return set(null);
            const n = Number(input.value);
            set(Number.isNaN(n) ? input.value : n);
          },
        }) as HTMLInputElement;
        if (field.constraints["value_type"] === "int") input.step = "1";
        const range = field.constraints["range"] as [number, number] | undefined;
        if (range) {
          input.min = String(range[0]);
          input.max = String(range[1]);
        }
        input.value = value === null ? "" : String(value);
        input.disabled = disabled;
        return input;
      }
      case "date_input": {
        const input = el("input", {
          type: "date",
          class: "control",
          onchange: () => set(input.value || null),
        }) as HTMLInputElement;
        input.value = value === null ? "" : String(value);
        input.disabled = disabled;
        return input;
      }
      default: {
        const input = el("input", {
          type: "text",
          class: "control",
          onchange: () => set(input.value || null),
        }) as HTMLInputElement;
        const maxLength = field.constraints["max_length"];
        if (typeof maxLength === "number") input.maxLength = maxLength;
        input.value = value === null ? "" : String(value);
        input.disabled = disabled;
        return input;
      }
    }
  }
}

// -- dashboard -------------------------------------------------------

export class DashboardPanel {
  stats: PhaseStats[] = [];
  private root: HTMLElement | null = null;

  constructor(
    private api: ApiClient,
    private project: string,
  ) {}

  async load(): Promise<void> {
    const res = await this.api.stats(this.project);
    this.stats = res.phases;
    this.render();
  }

  mount(root: HTMLElement): void {
    this.root = root;
    this.render();
  }

  private render(): void {
    const root = this.root;
    if (!root) return;
    clear(root);
    const table = el("table", { class: "stats-table" });
    table.append(
      el(
        "tr",
        {},
        ...["phase", "total", "assigned", "decided", "included", "excluded", "pending", "conflicts"].map(
          (h) => el("th", {}, h),
        ),
      ),
    );
    for (const row of this.stats) {
      table.append(
        el(
          "tr",
          {},
          el("td", {}, row.phase),
          el("td", {}, String(row.total)),
          el("td", {}, String(row.assigned)),
          el("td", {}, String(row.decided)),
          el("td", {}, String(row.included)),
          el("td", {}, String(row.excluded)),
          el("td", {}, String(row.pending)),
          el("td", {}, String(row.conflicts)),
        ),
      );
    }
    root.append(el("h3", {}, "Progress"), table);

    for (const row of this.stats) {
      const categories = Object.keys(row.distributions);
      const crit = criterionSeries(row);
      if (!categories.length && !crit.length) continue;
      const section = el("div", { class: "charts" }, el("h4", {}, row.phase));
      if (crit.length) section.append(this.chartPair("exclusions by criterion", crit));
      for (const category of categories) {
        const series = distributionSeries(row, category);
        if (series.length) section.append(this.chartPair(category, series));
      }
      root.append(section);
    }

    root.append(
      el(
        "p",
        { class: "export-links" },
        el("a", { href: this.api.statsExportUrl(this.project, "csv"), download: "stats.csv" }, "export CSV"),
        " ",
        el("a", { href: this.api.statsExportUrl(this.project, "json"), download: "stats.json" }, "export JSON"),
      ),
    );
  }

  private chartPair(title: string, series: Series[]): HTMLElement {
    const box = el("div", { class: "chart-pair" }, el("h5", {}, title));
    const bar = el("div", { class: "chart-bar" });
    bar.innerHTML = barChartSvg(series);
    const pie = el("div", { class: "chart-pie" });
    pie.innerHTML = pieChartSvg(series);
    box.append(bar, pie);
    return box;
  }
}

// -- application shell -----------------------------------------------

export class App {
  private user: { login: string } | null = null;
  private info: ProjectInfo | null = null;
  private schema: SchemaDoc | null = null;

  constructor(
    private api: ApiClient,
    private root: HTMLElement,
  ) {}

  start(): void {
    this.renderLogin();
  }

  private renderLogin(message = ""): void {
    clear(this.root);
    const login = el("input", { type: "text", id: "login", placeholder: "login" }) as HTMLInputElement;
    const credential = el("input", {
      type: "password",
      id: "credential",
      placeholder: "credential",
    }) as HTMLInputElement;
    const submit = async () => {
      try {
        const session = await this.api.login(login.value, credential.value);
        this.user = session.user;
        await this.renderProjects();
      } catch (err) {
        this.renderLogin(failureMessage(err));
      }
    };
    this.root.append(
      el(
        "div",
        { class: "login-box" },
        el("h2", {}, "srkit"),
        login,
        credential,
        el("button", { id: "btn-login", onclick: () => void submit() }, "Sign in"),
        message ? el("p", { class: "login-error" }, message) : null,
      ),
    );
  }

  private async renderProjects(): Promise<void> {
    const res = await this.api.me();
    clear(this.root);
    const box = el("div", { class: "project-list" }, el("h2", {}, `Projects for ${this.user?.login}`));
    for (const p of res.projects) {
      box.append(
        el(
          "button",
          { class: "project-link", onclick: () => void this.openProject(p.name) },
          `${p.label || p.name} (v${p.version})`,
        ),
      );
    }
    box.append(
      el(
        "button",
        { class: "project-new", onclick: () => this.renderNewProject() },
        "+ new project",
      ),
    );
    this.root.append(box);
  }

  private renderNewProject(): void {
    clear(this.root);
    const host = el("div", { class: "panel" });
    this.root.append(el("h2", {}, "New project"), host);
    const panel = new EditorPanel(this.api, null, null, () => void this.renderProjects());
    panel.mount(host);
  }

  private async openProject(name: string): Promise<void> {
    this.info = await this.api.projectInfo(name);
    this.schema = (await this.api.schema(name)).schema;
    this.renderProject();
  }

  private renderProject(): void {
    const info = this.info!;
    clear(this.root);
    const tabs: [string, () => void][] = [];
    // Tab set depends on rank: the model editor would only produce 403s
    // for non-admins, so it is simply absent for them.
    if (atLeast(info.rank, "admin")) tabs.push(["Model", () => this.showEditor()]);
    tabs.push(["Screening", () => this.showScreening()]);
    tabs.push(["Extraction", () => void this.showExtraction()]);
    tabs.push(["Dashboard", () => void this.showDashboard()]);

    const bar = el("div", { class: "tab-bar" }, el("strong", {}, info.project.label || info.project.name));
    for (const [label, open] of tabs) {
      bar.append(el("button", { class: "tab", onclick: open }, label));
    }
    bar.append(
      el("span", { class: "whoami" }, `${this.user?.login} · ${info.rank}`),
      el(
        "button",
        {
          class: "tab-back",
          onclick: () => void this.renderProjects(),
        },
        "projects",
      ),
    );
    const host = el("div", { class: "panel", id: "panel-host" });
    this.root.append(bar, host);
    const first = tabs[0];
    first[1]();
  }

  private host(): HTMLElement {
    const host = this.root.querySelector("#panel-host") as HTMLElement;
    clear(host);
    return host;
  }

  private showEditor(): void {
    const info = this.info!;
    const panel = new EditorPanel(this.api, info.project.name, info.project.version, () =>
      void this.openProject(info.project.name),
    );
    panel.mount(this.host());
  }

  private showScreening(): void {
    const info = this.info!;
    const host = this.host();
    const phaseHost = el("div", { class: "queue-host" });
    const conflictHost = el("div", { class: "conflict-host" });
    const select = el("select", { id: "phase-select" }) as HTMLSelectElement;
    for (const phase of info.phases) select.append(el("option", { value: phase.name }, phase.name));
    const openPhase = () => {
      const phase = info.phases.find((p) => p.name === select.value) ?? info.phases[0];
      if (!phase) return;
      const criteria = this.schema ? activeCriteria(this.schema) : [];
      const queue = new QueuePanel(this.api, info.project.name, phase, criteria);
      queue.mount(phaseHost);
      void queue.load();
      if (atLeast(info.rank, "senior")) {
        const conflicts = new ConflictPanel(
          this.api,
          info.project.name,
          phase.name,
          atLeast(info.rank, "senior"),
        );
        conflicts.mount(conflictHost);
        void conflicts.load();
      } else {
        clear(conflictHost);
      }
    };
    select.addEventListener("change", openPhase);
    host.append(el("label", {}, "Phase: ", select), phaseHost, conflictHost);
    openPhase();
  }

  private async showExtraction(): Promise<void> {
    const info = this.info!;
    const host = this.host();
    const res = await this.api.papers(info.project.name);
    const formHost = el("div", { class: "form-host" });
    const list = el("div", { class: "paper-list" });
    for (const paper of res.rows) {
      const payload = paper.payload as Partial<PaperPayload>;
      list.append(
        el(
          "button",
          {
            class: "paper-pick",
            onclick: () => {
              const panel = new FormPanel(this.api, info.project.name, paper.id);
              panel.mount(formHost);
              void panel.load();
            },
          },
          `#${paper.id} ${payload.title ?? payload.bibkey ?? ""}`,
        ),
      );
    }
    host.append(list, formHost);
  }

  private async showDashboard(): Promise<void> {
    const info = this.info!;
    const panel = new DashboardPanel(this.api, info.project.name);
    panel.mount(this.host());
    await panel.load();
  }
}
