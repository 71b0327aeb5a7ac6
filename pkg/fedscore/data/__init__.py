from .data_types import (LabelDistribution, LabelPools, PartitionPlan,
                         ReshuffleEvent, Shard, ShardSchedule, SyntheticSpec,
                         apply_skew)
from .loader import (Standardizer, load_csv_dataset, pools_from_dataset,
                     write_csv_dataset)
from .partition import draw_shard, slice_pools
from .synthetic import generate_public, generate_synthetic

__all__ = [
    "LabelDistribution",
    "LabelPools",
    "PartitionPlan",
    "ReshuffleEvent",
    "Shard",
    "ShardSchedule",
    "Standardizer",
    "SyntheticSpec",
    "apply_skew",
    "draw_shard",
    "generate_public",
    "generate_synthetic",
    "load_csv_dataset",
    "pools_from_dataset",
    "slice_pools",
    "write_csv_dataset",
]
