import csv
import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from jinja2 import Environment, FileSystemLoader

from fedscore import logging as fedscore_logging
from fedscore.simulator import ExperimentReport, SummaryRow, summarize

logger = fedscore_logging.get_logger(__name__)

_TEMPLATE_DIR = Path(__file__).with_name("templates")

REPORT_JSON = "report.json"


@lru_cache(maxsize=None)
def _get_env() -> Environment:
    return Environment(
        loader=FileSystemLoader(_TEMPLATE_DIR),
        autoescape=False,
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
    )


def _fixed(value: float) -> str:
    return f"{value:.6f}"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def emit_report(report: ExperimentReport, out_dir: str) -> dict[str, Path]:
    """Write the report and its plot-ready CSV views into ``out_dir``.

    ``report.json`` is byte-identical for identical runs; wall-clock figures
    go to ``timing.csv`` only.
    """
    out = Path(out_dir)
    os.makedirs(out, exist_ok=True)
    written: dict[str, Path] = {}

    path = out / REPORT_JSON
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(report.to_json())
    written["report"] = path

    records = list(report.records())

    written["accuracy"] = out / "accuracy.csv"
    _write_csv(written["accuracy"], ["iteration", "client", "local_acc", "global_acc", "fresh_acc"], (
        [r.iteration, r.client, _fixed(r.local_update_accuracy), _fixed(r.global_update_accuracy),
         _fixed(r.fresh_accuracy)]
        for r in records
    ))

    written["summary"] = out / "summary.csv"
    _write_csv(written["summary"], ["user", "local_mean", "global_mean", "increase"], (
        [row.user, _fixed(row.local_mean), _fixed(row.global_mean), _fixed(row.increase)]
        for row in summarize(report)
    ))

    written["global_accuracy"] = out / "global_accuracy.csv"
    _write_csv(written["global_accuracy"], ["iteration", "global_accuracy"], (
        [it.iteration, _fixed(it.global_accuracy)] for it in report.iterations
    ))

    written["payload"] = out / "payload.csv"
    _write_csv(written["payload"],
               ["iteration", "client", "score_payload_bytes", "weight_payload_bytes", "ratio"], (
                   [r.iteration, r.client, r.score_payload_bytes, r.weight_payload_bytes, _fixed(r.payload_ratio)]
                   for r in records
               ))

    written["betas"] = out / "betas.csv"
    _write_csv(written["betas"], ["iteration", "client", "label", "beta"], (
        [r.iteration, r.client, label, _fixed(beta)] for r in records for label, beta in r.betas.items()
    ))

    written["timing"] = out / "timing.csv"
    _write_csv(written["timing"],
               ["iteration", "client", "arch", "epochs_run", "train_seconds", "seconds_per_epoch",
                "inference_seconds"], (
                   [r.iteration, r.client, r.arch, r.epochs_run, _fixed(r.train_seconds),
                    _fixed(r.seconds_per_epoch), _fixed(r.inference_seconds)]
                   for r in records
               ))

    logger.info("Wrote report to %s", out)
    return written


def load_report(path: str) -> ExperimentReport:
    """Read a ``report.json`` (or the directory holding one) back into a report."""
    target = Path(path)
    if target.is_dir():
        target = target / REPORT_JSON
    with open(target, "r", encoding="utf-8") as handle:
        return ExperimentReport.from_dict(json.load(handle))


def render_summary(rows: Sequence[SummaryRow], title: str | None = None) -> str:
    width = max([len("User")] + [len(row.user) for row in rows])
    template = _get_env().get_template("summary.txt.j2")
    return template.render(rows=rows, width=width, title=title)
