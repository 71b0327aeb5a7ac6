import numpy as np

from fedscore import logging as fedscore_logging
from fedscore import utils
from fedscore.core import Dataset
from fedscore.data.data_types import LabelPools, PartitionPlan, ReshuffleEvent, Shard
from fedscore.errors import PoolExhausted

logger = fedscore_logging.get_logger(__name__)


def slice_pools(pools: LabelPools, plan: PartitionPlan) -> dict[tuple[str, str], np.ndarray]:
    """Split each label pool round-robin among the clients that declare it.

    Returns pool row indices keyed by ``(client, label)``; slices of one label
    are pairwise disjoint.
    """
    slices: dict[tuple[str, str], np.ndarray] = {}
    for label in pools.label_space.labels:
        claimants = plan.claimants(label)
        for k, client in enumerate(claimants):
            slices[(client, label)] = np.arange(k, pools.size(label), len(claimants), dtype=np.int64)
    return slices


def _stream_window(seed: int, client_idx: int, label_idx: int, slice_len: int,
                   start: int, count: int) -> tuple[np.ndarray, list[int]]:
    """Positions ``[start, start+count)`` of the client's endless draw stream.

    The stream is a sequence of permutations of the slice, one per pass
    ("epoch"); each pass is shuffled by its own derived generator.
    """
    positions = np.empty(count, dtype=np.int64)
    crossed: list[int] = []
    filled = 0
    while filled < count:
        cursor = start + filled
        epoch, offset = divmod(cursor, slice_len)
        if offset == 0 and epoch > 0:
            crossed.append(epoch)
        rng = utils.derive_rng(seed, utils.STREAM_POOL, client_idx, label_idx, epoch)
        order = rng.permutation(slice_len)
        take = min(slice_len - offset, count - filled)
        positions[filled:filled + take] = order[offset:offset + take]
        filled += take
    return positions, crossed


def draw_shard(pools: LabelPools, plan: PartitionPlan, client: str, iteration: int, seed: int,
               slices: dict[tuple[str, str], np.ndarray] | None = None) -> Shard:
    """Draw the planned rows for ``client`` at ``iteration``.

    A pure function of its arguments: the read offset into each slice is the
    sum of the client's planned counts over iterations ``1..iteration-1``.
    When a slice runs dry it is reshuffled under a fresh derived seed and the
    crossing is reported as a ReshuffleEvent.
    """
    if slices is None:
        slices = slice_pools(pools, plan)
    client_idx = plan.client_index(client)
    counts = plan.counts(client, iteration)

    parts: list[Dataset] = []
    pool_indices: dict[str, np.ndarray] = {}
    reshuffles: list[ReshuffleEvent] = []
    for label in pools.label_space.ordered(counts):
        count = counts[label]
        label_idx = pools.label_space.index(label)
        if count == 0:
            pool_indices[label] = np.zeros(0, dtype=np.int64)
            continue
        client_slice = slices.get((client, label))
        if client_slice is None or client_slice.size == 0:
            raise PoolExhausted(
                f"client {client!r} needs {count} rows of {label!r} but its pool slice is empty")
        start = sum(plan.counts(client, j)[label] for j in range(1, iteration))
        positions, crossed = _stream_window(seed, client_idx, label_idx, client_slice.size, start, count)
        for epoch in crossed:
            logger.info("Reshuffled %s slice of %s at iteration %d (pass %d)", label, client, iteration, epoch,
                        extra=fedscore_logging.round_fields(iteration, client, label))
            reshuffles.append(ReshuffleEvent(client, label, iteration, epoch))
        rows = client_slice[positions]
        pool_indices[label] = rows
        parts.append(Dataset(pools.features[label][rows], np.full(count, label_idx), pools.label_space))

    dataset = Dataset.concat(parts, pools.label_space, pools.n_features)
    return Shard(client, iteration, dataset, pool_indices, tuple(reshuffles))
