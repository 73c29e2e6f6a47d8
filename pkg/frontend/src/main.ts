/** DOM bootstrap: wires the queue, chart, metrics panel, and key bindings.
 * All review logic lives in queue.ts/chart.ts so it is testable headless.
 */

import { ApiClient, MetricsSnapshot } from "./api.js";
import { renderExcerptSvg } from "./chart.js";
import { actionForKey } from "./keys.js";
import { QueueView, ReviewQueue } from "./queue.js";

function fmt(value: number | null): string {
  return value === null ? "n/a" : `${value.toFixed(1)}%`;
}

function renderMetrics(m: MetricsSnapshot | null): string {
  if (!m) {
    return "<em>metrics unavailable</em>";
  }
  return [
    `proposals ${m.n_proposals}`,
    `P1 events ${m.n_p1_events}`,
    `P2 confirmed ${m.n_p2_confirmed}`,
    `SPCR(P1) ${fmt(m.spcr_p1)}`,
    `SPCR(P1+P2) ${fmt(m.spcr_p1p2)}`,
    `TCR(P1) ${fmt(m.tcr_p1)}`,
    `TCR(P1+P2) ${fmt(m.tcr_p1p2)}`,
  ].join(" &middot; ");
}

function render(view: QueueView): void {
  const chart = document.getElementById("chart")!;
  const status = document.getElementById("status")!;
  const metrics = document.getElementById("metrics")!;
  metrics.innerHTML = renderMetrics(view.metrics);
  if (view.done) {
    chart.innerHTML = "";
    status.textContent = view.unsent.length
      ? `done - ${view.unsent.length} verdict(s) queued for retry`
      : "done - queue empty";
    return;
  }
  const p = view.current!;
  status.textContent =
    `${p.proposal_id} @ ${p.time_s.toFixed(2)} s ` +
    `(score ${p.score.toFixed(4)} > tau ${p.threshold.toFixed(4)}) - ` +
    `${view.pending.length} pending`;
  chart.innerHTML = renderExcerptSvg(p);
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const reviewer = params.get("reviewer") ?? "anonymous";
  const api = new ApiClient("");
  const streams = await api.streams();
  const streamId = params.get("stream") ?? streams[0]?.id;
  if (!streamId) {
    document.getElementById("status")!.textContent = "no streams loaded";
    return;
  }
  const queue = new ReviewQueue(api, streamId, reviewer);
  render(await queue.refresh());

  document.addEventListener("keydown", async (ev) => {
    const action = actionForKey(ev.key);
    if (!action) {
      return;
    }
    ev.preventDefault();
    if (action === "skip") {
      render(queue.skip());
    } else {
      render(await queue.decide(action));
    }
  });
  window.setInterval(async () => {
    render(await queue.flush());
  }, 5000);
}

boot().catch((err) => {
  const status = document.getElementById("status");
  if (status) {
    status.textContent = `API unreachable - retrying (${err})`;
  }
  window.setTimeout(() => boot(), 3000);
});
