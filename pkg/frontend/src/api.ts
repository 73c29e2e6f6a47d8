/** Typed client for the review service HTTP+JSON interface.
 *
 * Every number shown in the UI comes from these endpoints; the console never
 * computes metrics locally.
 */

export interface StreamSummary {
  id: string;
  n_proposals: number;
}

export interface TraceExcerpt {
  times: number[];
  smoothed: number[];
  tau: number[];
}

export interface ProposalView {
  proposal_id: string;
  stream_id: string;
  frame_index: number;
  time_s: number;
  score: number;
  threshold: number;
  source: string;
  status: "pending" | "agreed" | "rejected";
  verdicts: Record<string, string>;
  excerpt: TraceExcerpt | null;
}

export interface LabelView {
  start_s: number;
  end_s: number;
  category: string;
  annotator_id: string;
}

export interface MetricsSnapshot {
  n_proposals: number;
  n_p1_events: number;
  n_p2_confirmed: number;
  spcr_p1: number | null;
  spcr_p1p2: number | null;
  tcr_p1: number | null;
  tcr_p1p2: number | null;
  dr: number | null;
}

export type Decision = "agree" | "reject";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ConflictError extends Error {}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly doFetch: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.doFetch(this.baseUrl + path);
    if (res.status !== 200) {
      throw new Error(`GET ${path} failed with ${res.status}`);
    }
    return (await res.json()) as T;
  }

  streams(): Promise<StreamSummary[]> {
    return this.get("/streams");
  }

  proposals(streamId: string, status?: string): Promise<ProposalView[]> {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.get(`/streams/${encodeURIComponent(streamId)}/proposals${query}`);
  }

  labels(streamId: string, annotator?: string): Promise<LabelView[]> {
    const query = annotator ? `?annotator=${encodeURIComponent(annotator)}` : "";
    return this.get(`/streams/${encodeURIComponent(streamId)}/labels${query}`);
  }

  metrics(): Promise<MetricsSnapshot> {
    return this.get("/metrics");
  }

  async submitVerdict(
    proposalId: string,
    reviewerId: string,
    decision: Decision,
  ): Promise<ProposalView> {
    const res = await this.doFetch(
      `${this.baseUrl}/proposals/${encodeURIComponent(proposalId)}/verdicts`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ decision, reviewer_id: reviewerId }),
      },
    );
    if (res.status === 409) {
      throw new ConflictError(`already voted on ${proposalId}`);
    }
    if (res.status !== 201) {
      throw new Error(`verdict on ${proposalId} failed with ${res.status}`);
    }
    return (await res.json()) as ProposalView;
  }
}
