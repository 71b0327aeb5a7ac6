from .simulator import ExperimentData, Simulator, prepare_data, run_experiment
from .simulator_types import (ArchSchedule, ClientConfig, ClientRecord, DataConfig,
                              ExperimentConfig, ExperimentReport, IterationRecord,
                              SummaryRow)
from .summary import AVERAGE_ROW, summarize

__all__ = [
    "AVERAGE_ROW",
    "ArchSchedule",
    "ClientConfig",
    "ClientRecord",
    "DataConfig",
    "ExperimentConfig",
    "ExperimentData",
    "ExperimentReport",
    "IterationRecord",
    "Simulator",
    "SummaryRow",
    "prepare_data",
    "run_experiment",
    "summarize",
]
