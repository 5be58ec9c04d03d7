"""Result files: per-slot CSV, summary JSON and one ECDF CSV per alpha.

Floats are written with ``repr`` so every file is byte-stable and parses
back to the exact same values.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from nrsched.sim.engine import RunArtifact

SLOTS_FILE = "slots.csv"
SUMMARY_FILE = "summary.json"


def ecdf_filename(alpha: float) -> str:
    return f"ecdf_alpha_{float(alpha)!r}.csv"


def slot_header(num_ues: int) -> list[str]:
    return (
        ["slot", "alpha", "seed", "sum_rate_bps", "fairness", "sweeps", "energy"]
        + [f"ue{u}_rate_bps" for u in range(num_ues)]
        + [f"ue{u}_avg_bps" for u in range(num_ues)]
    )


def _f(x) -> str:
    return repr(float(x))


def emit_results(artifact: RunArtifact, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
    config = artifact.config
    written = []

    path = out / SLOTS_FILE
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(slot_header(config.num_ues))
        for alpha in config.alphas:
            for seed in config.seeds:
                for rec in artifact.records[(alpha, seed)]:
                    writer.writerow(
                        [rec.slot, _f(alpha), seed, _f(rec.sum_rate_bps), _f(rec.fairness),
                         rec.sweeps, _f(rec.energy)]
                        + [_f(v) for v in rec.rates_bps]
                        + [_f(v) for v in rec.averages_bps]
                    )
    written.append(path)

    for alpha in config.alphas:
        path = out / ecdf_filename(alpha)
        with _open(path) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["alpha", "value_mbps", "cum_prob"])
            for value, prob in artifact.summary[repr(float(alpha))]["sum_rate_ecdf"]:
                writer.writerow([_f(alpha), _f(value), _f(prob)])
        written.append(path)

    path = out / SUMMARY_FILE
    with _open(path) as fh:
        json.dump(artifact.summary, fh, indent=2)
        fh.write("\n")
    written.append(path)
    return written


def _open(path: Path):
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_summary(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_ecdf_csv(path: str | Path) -> list[tuple[float, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [(float(r["value_mbps"]), float(r["cum_prob"])) for r in rows]
