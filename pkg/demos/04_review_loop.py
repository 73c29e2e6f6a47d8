"""Phase-2 adjudication round-trip against the review service.

Loads a trigger log as proposals, lets three simulated reviewers vote over
HTTP, and shows the consensus metrics move as proposals are confirmed.
Run `latentwatch serve --store-dir ... --triggers ...` for the live version
with the browser console mounted at /console.
"""

import tempfile

from fastapi.testclient import TestClient

from latentwatch.extractor import TriggerEvent
from latentwatch.review import ReviewStore, create_app
from latentwatch.seqio import EventLabel


def main() -> None:
    with tempfile.TemporaryDirectory() as root:
        store = ReviewStore(root)
        triggers = [TriggerEvent(300 * k, 10.0 * k, 0.5, 0.1, "compensated")
                    for k in range(1, 11)]
        labels = [EventLabel(10.0 * k, 10.0 * k, "environmental", "ann1")
                  for k in range(1, 6)]
        store.load_stream("dive1", triggers, labels=labels)
        client = TestClient(create_app(store))

        before = client.get("/metrics").json()
        print(f"before review: TCR(P1) = {before['tcr_p1']:.1f}%, "
              f"TCR(P1+P2) = {before['tcr_p1p2']:.1f}%")

        # the five proposals without a Phase-1 match get majority-agreed
        for k in range(6, 11):
            pid = f"dive1-{300 * k:06d}"
            for reviewer in ("r1", "r2", "r3"):
                resp = client.post(f"/proposals/{pid}/verdicts",
                                   json={"decision": "agree",
                                         "reviewer_id": reviewer})
                assert resp.status_code == 201
            print(f"  {pid}: "
                  f"{client.get(f'/proposals/{pid}').json()['status']}")

        after = client.get("/metrics").json()
        print(f"after review:  TCR(P1) = {after['tcr_p1']:.1f}%, "
              f"TCR(P1+P2) = {after['tcr_p1p2']:.1f}%  "
              f"(+{after['tcr_p1p2'] - after['tcr_p1']:.1f} points from "
              f"{after['n_p2_confirmed']} confirmations)")


if __name__ == "__main__":
    main()
