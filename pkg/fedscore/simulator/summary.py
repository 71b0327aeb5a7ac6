from statistics import fmean

from fedscore.simulator.simulator_types import ExperimentReport, SummaryRow

AVERAGE_ROW = "average"


def summarize(report: ExperimentReport) -> list[SummaryRow]:
    """Per-user mean local and global update accuracy, plus an overall row.

    Users come in client declaration order; a user without records is left
    out. The trailing ``average`` row is taken over every record of the run.
    """
    rows: list[SummaryRow] = []
    for client in report.clients:
        records = report.records_for(client)
        if not records:
            continue
        rows.append(SummaryRow(
            user=client,
            local_mean=fmean(r.local_update_accuracy for r in records),
            global_mean=fmean(r.global_update_accuracy for r in records),
            records=len(records),
        ))
    everything = list(report.records())
    if everything:
        rows.append(SummaryRow(
            user=AVERAGE_ROW,
            local_mean=fmean(r.local_update_accuracy for r in everything),
            global_mean=fmean(r.global_update_accuracy for r in everything),
            records=len(everything),
        ))
    return rows
