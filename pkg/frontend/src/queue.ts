// Screening queue state. One paper is shown at a time; a decision draft is
// collected locally and only a complete draft may be submitted. Excluding
// without naming a criterion is the one thing the server would reject that
// we can catch for free, so it is blocked before the request exists.

import type { QueueItem } from "./types.js";

export interface DecisionDraft {
  verdict: "include" | "exclude" | null;
  criterion: string | null;
  note: string;
}

const EMPTY: DecisionDraft = { verdict: null, criterion: null, note: "" };

export class ScreeningQueue {
  items: QueueItem[] = [];
  draft: DecisionDraft = { ...EMPTY };

  load(items: QueueItem[]): void {
    this.items = items.slice();
    this.draft = { ...EMPTY };
  }

  get current(): QueueItem | null {
    return this.items[0] ?? null;
  }

  get count(): number {
    return this.items.length;
  }

  chooseVerdict(verdict: "include" | "exclude"): void {
    this.draft.verdict = verdict;
    if (verdict === "include") this.draft.criterion = null;
  }

  chooseCriterion(id: string | null): void {
    this.draft.criterion = id;
  }

  get blockReason(): string | null {
    if (this.draft.verdict === null) return "choose include or exclude first";
    if (this.draft.verdict === "exclude" && !this.draft.criterion) {
      return "an exclusion needs a criterion";
    }
    return null;
  }

  get canSubmit(): boolean {
    return this.current !== null && this.blockReason === null;
  }

  /** Optimistic advancement: the caller restores the item if the POST fails. */
  advance(): QueueItem | null {
    const done = this.items.shift() ?? null;
    this.draft = { ...EMPTY };
    return done;
  }

  restore(item: QueueItem): void {
    this.items.unshift(item);
  }
}
