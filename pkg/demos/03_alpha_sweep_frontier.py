"""Bandwidth/quality frontier: sweep the threshold gain over every method.

Writes sweep.csv and frontier.svg under demos/out/sweep/ via the replay
harness, using a direct-difference scorer so the demo finishes in seconds.
"""

from pathlib import Path

from latentwatch import scenario, seqio
from latentwatch.runner import RunManifest, alpha_sweep
from latentwatch.scenario import EventSpec, ScenarioConfig

OUT = Path(__file__).parent / "out" / "sweep"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    cfg = ScenarioConfig(dim=8, num_frames=2700, fps=30.0, seed=3,
                         drift_scale=0.0005, noise_scale=0.002,
                         events=tuple(EventSpec(15.0 * k, 1.0, 1.0,
                                                "transition")
                                      for k in range(1, 6)))
    seq, labels = scenario.generate(cfg)
    latents = OUT / "world.lseq"
    label_file = OUT / "world.labels"
    seqio.write_sequence(seq, latents)
    seqio.write_labels(labels, label_file)

    manifest = RunManifest(latents=str(latents), labels=str(label_file),
                           method="direct_diff", warmup=120,
                           out_dir=str(OUT))
    results = alpha_sweep(manifest, methods=["direct_diff", "uniform"])
    print(f"{'method':12s} {'alpha':>5s} {'n':>3s} {'BSR':>7s} {'F1':>6s}")
    for r in results:
        f1 = "--" if r.row["f1"] is None else f"{r.row['f1']:.3f}"
        print(f"{r.method:12s} {r.alpha:5.1f} {r.row['n_triggers']:3d} "
              f"{r.row['bsr']:7.2f} {f1:>6s}")
    print(f"report written to {OUT} (sweep.csv, frontier.svg)")


if __name__ == "__main__":
    main()
