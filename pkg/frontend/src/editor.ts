// State machine behind the model editor. The rules it enforces:
//
//   * install stays disabled while any diagnostic has severity "error";
//   * installing over an existing project requires a diff preview of the
//     exact source being installed, so nobody confirms a stale plan;
//   * a preview with no operations means the model is unchanged and the
//     confirm button stays disabled.

import type { Diagnostic, InstallReport } from "./types.js";

export class EditorState {
  source = "";
  diagnostics: Diagnostic[] = [];
  dirty = false;
  lastInstalledVersion: number | null = null;
  preview: InstallReport | null = null;
  private previewedSource: string | null = null;

  edit(source: string): void {
    if (source === this.source) return;
    this.source = source;
    this.dirty = true;
    // A preview describes one exact source; any edit invalidates it.
    this.preview = null;
    this.previewedSource = null;
  }

  setDiagnostics(diagnostics: Diagnostic[]): void {
    this.diagnostics = diagnostics;
  }

  get errors(): Diagnostic[] {
    return this.diagnostics.filter((d) => d.severity === "error");
  }

  get fresh(): boolean {
    return this.lastInstalledVersion === null;
  }

  get previewCurrent(): boolean {
    return this.preview !== null && this.previewedSource === this.source;
  }

  get noChanges(): boolean {
    return this.previewCurrent && this.preview!.ops.length === 0;
  }

  /** The install (or create) action itself. */
  get canInstall(): boolean {
    if (this.errors.length > 0) return false;
    if (this.fresh) return this.source.trim() !== "";
    return this.previewCurrent;
  }

  /** Final confirmation: additionally blocked when nothing would change. */
  get canConfirm(): boolean {
    if (!this.canInstall) return false;
    if (this.fresh) return true;
    return !this.noChanges;
  }

  recordPreview(report: InstallReport): void {
    this.preview = report;
    this.previewedSource = this.source;
  }

  recordInstall(version: number): void {
    this.lastInstalledVersion = version;
    this.dirty = false;
    this.preview = null;
    this.previewedSource = null;
    this.diagnostics = [];
  }

  /** First error position, for scrolling the editor to the marker. */
  firstErrorLine(): number | null {
    const errors = this.errors;
    if (!errors.length) return null;
    return errors.reduce((a, b) => (b.line < a.line ? b : a)).line;
  }
}
