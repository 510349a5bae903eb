// Thin typed wrapper around fetch. Every method maps 1:1 onto a service
// route; no request is synthesized that the routes below do not offer.

import type {
  ConflictCase,
  Diagnostic,
  FormDoc,
  InstallResult,
  PhaseStats,
  ProjectInfo,
  ProjectSummary,
  PublicUser,
  QueueItem,
  SchemaDoc,
  Session,
  StoredRecord,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Normalized failure: the server's error envelope plus the HTTP status. */
export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: unknown = null,
  ) {
    super(message);
    this.name = "ApiFailure";
  }

  /** Diagnostics from a 422 model-error response, empty otherwise. */
  get diagnostics(): Diagnostic[] {
    return Array.isArray(this.details) ? (this.details as Diagnostic[]) : [];
  }
}

export class ApiClient {
  token: string | null = null;

  constructor(
    private base = "",
    private fetchImpl: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["authorization"] = `Bearer ${this.token}`;
    let payload: string | undefined;
    if (body !== undefined) {
      headers["content-type"] = "application/json";
      payload = JSON.stringify(body);
    }
    const res = await this.fetchImpl(this.base + path, { method, headers, body: payload });
    const text = await res.text();
    let doc: unknown = null;
    if (text) {
      try {
        doc = JSON.parse(text);
      } catch {
        doc = text;
      }
    }
    if (!res.ok) {
      const err = (doc as { error?: { code?: string; message?: string; details?: unknown } })?.error;
      throw new ApiFailure(
        res.status,
        err?.code ?? "E_HTTP",
        err?.message ?? `request failed with status ${res.status}`,
        err?.details ?? null,
      );
    }
    return doc as T;
  }

  // -- session -------------------------------------------------------

  async login(login: string, credential: string): Promise<Session> {
    const session = await this.request<Session>("POST", "/auth/login", { login, credential });
    this.token = session.token;
    return session;
  }

  async logout(): Promise<void> {
    await this.request("POST", "/auth/logout");
    this.token = null;
  }

  me(): Promise<{ user: PublicUser; projects: ProjectSummary[] }> {
    return this.request("GET", "/me");
  }

  // -- projects ------------------------------------------------------

  listProjects(): Promise<{ projects: ProjectSummary[] }> {
    return this.request("GET", "/projects");
  }

  createProject(source: string): Promise<{ project: ProjectSummary; version: number }> {
    return this.request("POST", "/projects", { source });
  }

  projectInfo(project: string): Promise<ProjectInfo> {
    return this.request("GET", `/projects/${project}`);
  }

  install(
    project: string,
    source: string,
    opts: { dryRun?: boolean; baseVersion?: number | null } = {},
  ): Promise<InstallResult> {
    const query = opts.dryRun ? "?dry_run=true" : "";
    const body: Record<string, unknown> = { source };
    if (opts.baseVersion != null) body["base_version"] = opts.baseVersion;
    return this.request("POST", `/projects/${project}/install${query}`, body);
  }

  schema(project: string): Promise<{ schema: SchemaDoc }> {
    return this.request("GET", `/projects/${project}/schema`);
  }

  form(project: string): Promise<{ form: FormDoc }> {
    return this.request("GET", `/projects/${project}/form`);
  }

  // -- corpus --------------------------------------------------------

  importPapers(
    project: string,
    payload: string,
    format: "csv" | "bibtex",
  ): Promise<{ imported: number; rejected: unknown[] }> {
    return this.request("POST", `/projects/${project}/papers/import?format=${format}`, { payload });
  }

  papers(
    project: string,
    page?: number,
  ): Promise<{ rows: StoredRecord[]; total: number }> {
    const query = page ? `?page=${page}` : "";
    return this.request("GET", `/projects/${project}/papers${query}`);
  }

  // -- screening -----------------------------------------------------

  autoAssign(project: string, phase: string, seed?: number): Promise<{ count: number }> {
    return this.request("POST", `/projects/${project}/phases/${phase}/assign`, { seed });
  }

  queue(project: string, phase?: string): Promise<{ queue: QueueItem[] }> {
    const path = phase
      ? `/projects/${project}/phases/${phase}/queue`
      : `/projects/${project}/queue`;
    return this.request("GET", path);
  }

  decide(
    ref: string,
    verdict: "include" | "exclude",
    criterion: string | null,
    note: string | null,
  ): Promise<{ decision: StoredRecord }> {
    return this.request("POST", `/assignments/${ref}/decision`, { verdict, criterion, note });
  }

  conflicts(project: string, phase: string): Promise<{ conflicts: ConflictCase[] }> {
    return this.request("GET", `/projects/${project}/phases/${phase}/conflicts`);
  }

  resolveConflicts(project: string, phase: string): Promise<{ cases: unknown[] }> {
    return this.request("POST", `/projects/${project}/phases/${phase}/conflicts/resolve`);
  }

  // -- classification ------------------------------------------------

  classification(project: string, paperId: number): Promise<{ record: StoredRecord | null }> {
    return this.request("GET", `/projects/${project}/papers/${paperId}/classification`);
  }

  saveClassification(
    project: string,
    paperId: number,
    values: Record<string, unknown[]>,
    markComplete: boolean,
    expectedVersion: number | null,
  ): Promise<{ record: StoredRecord }> {
    return this.request("PUT", `/projects/${project}/papers/${paperId}/classification`, {
      values,
      mark_complete: markComplete,
      expected_version: expectedVersion,
    });
  }

  addChoice(
    project: string,
    category: string,
    value: string,
  ): Promise<{ category: string; choices: { id: string; value: string }[] }> {
    return this.request("POST", `/projects/${project}/categories/${category}/choices`, { value });
  }

  // -- statistics ----------------------------------------------------

  stats(project: string): Promise<{ phases: PhaseStats[] }> {
    return this.request("GET", `/projects/${project}/stats`);
  }

  statsExportUrl(project: string, format: "csv" | "json"): string {
    return `${this.base}/projects/${project}/stats.${format}`;
  }
}
