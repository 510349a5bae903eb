// Wire types for the srkit service API. These mirror the JSON the server
// emits; nothing here is invented on the client side.

export interface PublicUser {
  id: string;
  login: string;
  display_name: string;
}

export interface Session {
  token: string;
  user: PublicUser;
  expires_at: string;
}

export type Severity = "error" | "warning";

/** One entry of a 422 response body, pre-flattened by the server. */
export interface Diagnostic {
  severity: Severity;
  code: string;
  message: string;
  line: number;
  column: number;
}

export interface ApiErrorBody {
  error: {
    code: string;
    message: string;
    details: unknown;
  };
}

// -- projects and schema ---------------------------------------------

export interface ProjectSummary {
  name: string;
  label: string;
  version: number;
}

export interface PhaseInfo {
  name: string;
  evidence: "metadata" | "abstract" | "fulltext";
  open: boolean;
}

export interface ProjectInfo {
  project: ProjectSummary;
  rank: "reviewer" | "senior" | "admin";
  role: string | null;
  phases: PhaseInfo[];
  policies: Record<string, unknown>;
}

export interface SchemaElement {
  id: string;
  kind: "role" | "phase" | "criterion" | "category" | "choice";
  descriptor: Record<string, unknown>;
  introduced_in: number;
  status: "active" | "inactive";
  deactivated_in: number | null;
}

export interface SchemaDoc {
  project_id: string;
  version: number;
  elements: SchemaElement[];
  policies: Record<string, unknown>;
}

export interface PlanOp {
  op: "add" | "drop" | "deactivate" | "reactivate";
  id: string;
  reason: string;
}

export interface InstallReport {
  base_version: number;
  target_version: number;
  ops: PlanOp[];
}

export interface InstallResult {
  dry_run: boolean;
  version: number;
  report: InstallReport;
}

// -- forms -----------------------------------------------------------

export type Widget =
  | "text_input"
  | "number_input"
  | "checkbox"
  | "date_input"
  | "single_select"
  | "dynamic_select";

export interface ChoiceOption {
  id: string;
  value: string;
}

export interface DependsOn {
  parent: string;
  mapping: Record<string, string[]>;
}

export interface FieldDoc {
  element: string;
  name: string;
  title: string;
  widget: Widget;
  mandatory: boolean;
  /** 0 means unlimited rows. */
  multiplicity: number;
  constraints: Record<string, unknown>;
  options: ChoiceOption[] | null;
  allows_additions: boolean;
  depends_on: DependsOn | null;
  children: FieldDoc[];
}

export interface FormDoc {
  version: number;
  fields: FieldDoc[];
}

// -- records ---------------------------------------------------------

export interface StoredRecord {
  id: number;
  element_id: string;
  paper_id: number | null;
  payload: Record<string, unknown>;
  refs: string[];
  created_by: string;
  created_at: string;
  record_version: number;
}

export interface PaperPayload {
  bibkey: string;
  title: string;
  authors: string[];
  venue: string;
  year: number | null;
  abstract: string | null;
  link: string;
}

export interface QueueItem {
  assignment: StoredRecord & { ref: string };
  phase: string;
  paper: StoredRecord | null;
}

export interface ConflictCase {
  case: StoredRecord;
  verdicts: { reviewer: string; verdict: string; criterion: string | null }[];
}

export interface Violation {
  element: string;
  code: string;
  rule: string;
  message: string;
}

// -- statistics ------------------------------------------------------

export interface PhaseStats {
  phase: string;
  phase_element: string;
  total: number;
  assigned: number;
  decided: number;
  included: number;
  excluded: number;
  pending: number;
  conflicts: number;
  per_criterion: Record<string, number>;
  distributions: Record<string, Record<string, number>>;
}

export interface StatsDoc {
  phases: PhaseStats[];
}
