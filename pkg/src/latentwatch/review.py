"""Trigger adjudication service: serves proposals with trace context, accepts
Agree/Reject verdicts, and recomputes post-discovery consensus metrics.

Persistence is a single append-only JSONL verdict log; the in-memory index is
rebuilt from it on start. Proposal status is derived from the configured vote
rule (default: simple majority of submitted verdicts, ties stay pending).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, HTTPException
from pydantic import BaseModel

from . import metrics as metrics_mod
from .seqio import EventLabel

__all__ = ["Proposal", "ReviewStore", "create_app"]

VERDICT_LOG = "verdicts.jsonl"


@dataclass
class Proposal:
    proposal_id: str
    stream_id: str
    frame_index: int
    time_s: float
    score: float
    threshold: float
    source: str
    excerpt: Optional[dict] = None  # {"times": [...], "smoothed": [...], "tau": [...]}


class ReviewStore:
    """Streams, proposals, P1 labels, and the append-only verdict log."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._streams: dict[str, dict] = {}
        self._proposals: dict[str, Proposal] = {}
        self._verdicts: dict[str, dict[str, str]] = {}
        self._log_path = self.root / VERDICT_LOG
        if self._log_path.exists():
            for line in self._log_path.read_text().splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                self._verdicts.setdefault(rec["proposal_id"], {})[
                    rec["reviewer_id"]] = rec["decision"]

    def load_stream(self, stream_id: str, triggers, labels=None,
                    trace=None, fps: Optional[float] = None,
                    excerpt_s: float = 3.0) -> None:
        """Register one trigger log as a proposal stream.

        When a (trace, fps) pair is supplied, each proposal carries a
        +/- excerpt_s excerpt of (times, smoothed, tau) chart data.
        """
        proposals = []
        for ev in sorted(triggers, key=lambda e: e.time_s):
            pid = f"{stream_id}-{ev.frame_index:06d}"
            excerpt = None
            if trace is not None and fps is not None:
                smoothed, tau = trace
                half = int(round(excerpt_s * fps))
                lo = max(ev.frame_index - half, 0)
                hi = min(ev.frame_index + half + 1, len(smoothed))
                excerpt = {
                    "times": [i / fps for i in range(lo, hi)],
                    "smoothed": [float(smoothed[i]) for i in range(lo, hi)],
                    "tau": [float(tau[i]) for i in range(lo, hi)],
                }
            proposals.append(Proposal(pid, stream_id, ev.frame_index, ev.time_s,
                                      ev.score, ev.threshold, ev.source, excerpt))
        self._streams[stream_id] = {
            "proposals": [p.proposal_id for p in proposals],
            "labels": list(labels or []),
        }
        for p in proposals:
            self._proposals[p.proposal_id] = p

    # -- queries ------------------------------------------------------------

    def streams(self) -> list[dict]:
        return [{"id": sid, "n_proposals": len(s["proposals"])}
                for sid, s in sorted(self._streams.items())]

    def labels(self, stream_id: str) -> list[EventLabel]:
        if stream_id not in self._streams:
            raise KeyError(stream_id)
        return self._streams[stream_id]["labels"]

    def status(self, proposal_id: str) -> str:
        votes = self._verdicts.get(proposal_id, {})
        agree = sum(1 for d in votes.values() if d == "agree")
        reject = len(votes) - agree
        if agree > reject:
            return "agreed"
        if reject > agree:
            return "rejected"
        return "pending"

    def proposal_view(self, proposal_id: str) -> dict:
        p = self._proposals[proposal_id]
        return {
            "proposal_id": p.proposal_id,
            "stream_id": p.stream_id,
            "frame_index": p.frame_index,
            "time_s": p.time_s,
            "score": p.score,
            "threshold": p.threshold,
            "source": p.source,
            "status": self.status(proposal_id),
            "verdicts": dict(self._verdicts.get(proposal_id, {})),
            "excerpt": p.excerpt,
        }

    def list_proposals(self, stream_id: str, status: Optional[str] = None,
                       offset: int = 0, limit: int = 100) -> list[dict]:
        if stream_id not in self._streams:
            raise KeyError(stream_id)
        views = [self.proposal_view(pid)
                 for pid in self._streams[stream_id]["proposals"]]
        if status is not None:
            views = [v for v in views if v["status"] == status]
        return views[offset:offset + limit]

    # -- mutation -----------------------------------------------------------

    def submit_verdict(self, proposal_id: str, reviewer_id: str,
                       decision: str) -> dict:
        if decision not in ("agree", "reject"):
            raise ValueError("decision must be agree or reject")
        if proposal_id not in self._proposals:
            raise KeyError(proposal_id)
        with self._lock:
            votes = self._verdicts.setdefault(proposal_id, {})
            if reviewer_id in votes:
                raise FileExistsError(f"{reviewer_id} already voted on {proposal_id}")
            # persist before acknowledging
            with self._log_path.open("a") as fh:
                fh.write(json.dumps({"proposal_id": proposal_id,
                                     "reviewer_id": reviewer_id,
                                     "decision": decision}) + "\n")
                fh.flush()
            votes[reviewer_id] = decision
        return self.proposal_view(proposal_id)

    # -- metrics ------------------------------------------------------------

    def metrics_snapshot(self, tolerance_s: float = 3.0) -> dict:
        triggers = [p.time_s for p in self._proposals.values()]
        p1_events = [
            metrics_mod.ConsensusEvent(lab.start_s, lab.end_s, lab.category, "P1")
            for s in self._streams.values() for lab in s["labels"]
        ]
        p2_events = [
            metrics_mod.ConsensusEvent(p.time_s, p.time_s, "spatial_transition", "P2")
            for pid, p in self._proposals.items() if self.status(pid) == "agreed"
        ]
        counts = {
            "n_proposals": len(triggers),
            "n_p1_events": len(p1_events),
            "n_p2_confirmed": len(p2_events),
        }
        if not p1_events:
            return {**counts, "spcr_p1": None, "spcr_p1p2": None,
                    "tcr_p1": None, "tcr_p1p2": None, "dr": None}
        consensus = metrics_mod.ConsensusSet(tuple(p1_events + p2_events))
        rates = metrics_mod.consensus_rates(
            triggers, consensus, metrics_mod.MatchConfig(tolerance_s))
        return {**counts, **rates}


class VerdictIn(BaseModel):
    decision: str
    reviewer_id: Optional[str] = None


def create_app(store: ReviewStore, console_dir=None) -> FastAPI:
    app = FastAPI(title="latentwatch review")

    @app.get("/streams")
    def get_streams():
        return store.streams()

    @app.get("/streams/{stream_id}/proposals")
    def get_proposals(stream_id: str, status: Optional[str] = None,
                      offset: int = 0, limit: int = 100):
        try:
            return store.list_proposals(stream_id, status, offset, limit)
        except KeyError:
            raise HTTPException(404, f"unknown stream {stream_id}")

    @app.get("/streams/{stream_id}/labels")
    def get_labels(stream_id: str, annotator: Optional[str] = None):
        try:
            labels = store.labels(stream_id)
        except KeyError:
            raise HTTPException(404, f"unknown stream {stream_id}")
        if annotator is not None:
            labels = [lab for lab in labels if lab.annotator_id == annotator]
        return [{"start_s": lab.start_s, "end_s": lab.end_s,
                 "category": lab.category, "annotator_id": lab.annotator_id}
                for lab in labels]

    @app.get("/proposals/{proposal_id}")
    def get_proposal(proposal_id: str):
        try:
            return store.proposal_view(proposal_id)
        except KeyError:
            raise HTTPException(404, f"unknown proposal {proposal_id}")

    @app.post("/proposals/{proposal_id}/verdicts", status_code=201)
    def post_verdict(proposal_id: str, verdict: VerdictIn,
                     x_reviewer_id: Optional[str] = Header(default=None)):
        reviewer = verdict.reviewer_id or x_reviewer_id
        if not reviewer:
            raise HTTPException(422, "reviewer id required (body or X-Reviewer-Id)")
        try:
            return store.submit_verdict(proposal_id, reviewer, verdict.decision)
        except KeyError:
            raise HTTPException(404, f"unknown proposal {proposal_id}")
        except FileExistsError as exc:
            raise HTTPException(409, str(exc))
        except ValueError as exc:
            raise HTTPException(422, str(exc))

    @app.get("/metrics")
    def get_metrics(tolerance_s: float = 3.0):
        return store.metrics_snapshot(tolerance_s)

    if console_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/console", StaticFiles(directory=console_dir, html=True),
                  name="console")
    return app
