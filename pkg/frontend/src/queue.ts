/** Review queue state: server-ordered pending proposals, minus any proposal
 * that overlaps one of the reviewer's own Phase-1 intervals, with optimistic
 * advance and a retry buffer for verdicts that failed to send.
 */

import {
  ApiClient,
  ConflictError,
  Decision,
  LabelView,
  MetricsSnapshot,
  ProposalView,
} from "./api.js";

export interface Interval {
  start_s: number;
  end_s: number;
}

export interface PendingVerdict {
  proposalId: string;
  decision: Decision;
}

/** A proposal overlaps an interval when its instant lies inside it. */
export function overlapsOwnInterval(
  proposal: ProposalView,
  intervals: Interval[],
): boolean {
  return intervals.some(
    (iv) => proposal.time_s >= iv.start_s && proposal.time_s <= iv.end_s,
  );
}

export function filterQueue(
  proposals: ProposalView[],
  ownIntervals: Interval[],
): ProposalView[] {
  return proposals.filter(
    (p) => p.status === "pending" && !overlapsOwnInterval(p, ownIntervals),
  );
}

export interface QueueView {
  reviewerId: string;
  pending: ProposalView[];
  current: ProposalView | null;
  done: boolean;
  metrics: MetricsSnapshot | null;
  unsent: PendingVerdict[];
}

export class ReviewQueue {
  private pending: ProposalView[] = [];
  private ownIntervals: Interval[] = [];
  private metrics: MetricsSnapshot | null = null;
  private unsent: PendingVerdict[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly streamId: string,
    readonly reviewerId: string,
  ) {}

  async refresh(): Promise<QueueView> {
    const [proposals, labels, metrics] = await Promise.all([
      this.api.proposals(this.streamId),
      this.api.labels(this.streamId, this.reviewerId),
      this.api.metrics(),
    ]);
    this.ownIntervals = labels.map((lab: LabelView) => ({
      start_s: lab.start_s,
      end_s: lab.end_s,
    }));
    this.pending = filterQueue(proposals, this.ownIntervals);
    this.metrics = metrics;
    return this.view();
  }

  view(): QueueView {
    return {
      reviewerId: this.reviewerId,
      pending: [...this.pending],
      current: this.pending[0] ?? null,
      done: this.pending.length === 0,
      metrics: this.metrics,
      unsent: [...this.unsent],
    };
  }

  /** Skip moves the head to the back without a verdict. */
  skip(): QueueView {
    const head = this.pending.shift();
    if (head) {
      this.pending.push(head);
    }
    return this.view();
  }

  /** Optimistically advance, then reconcile with the server response.
   *
   * A conflict means someone (or a previous retry) already voted: refresh.
   * A network failure keeps the verdict in the unsent buffer for flush().
   */
  async decide(decision: Decision): Promise<QueueView> {
    const head = this.pending.shift();
    if (!head) {
      return this.view();
    }
    try {
      await this.api.submitVerdict(head.proposal_id, this.reviewerId, decision);
      this.metrics = await this.api.metrics();
    } catch (err) {
      if (err instanceof ConflictError) {
        return this.refresh();
      }
      this.unsent.push({ proposalId: head.proposal_id, decision });
    }
    return this.view();
  }

  /** Retry buffered verdicts; conflicts are dropped as already-recorded. */
  async flush(): Promise<QueueView> {
    const retrying = this.unsent;
    this.unsent = [];
    for (const v of retrying) {
      try {
        await this.api.submitVerdict(v.proposalId, this.reviewerId, v.decision);
      } catch (err) {
        if (!(err instanceof ConflictError)) {
          this.unsent.push(v);
        }
      }
    }
    if (this.unsent.length === 0) {
      this.metrics = await this.api.metrics();
    }
    return this.view();
  }
}
