from typing import Mapping, Sequence

import numpy as np

from fedscore import logging as fedscore_logging
from fedscore.core import Dataset, GlobalScoreState, LabelSpace, ScoreMatrix
from fedscore.errors import NoParticipants, ShapeMismatch, UnclaimedLabel
from fedscore.protocol.metrics import evaluate_user_accuracy, per_label_accuracy
from fedscore.protocol.protocol_types import AggregateMode, BetaAccuracy, BetaAssignment, LocalRound

logger = fedscore_logging.get_logger(__name__)


def label_claims(rounds: Sequence[LocalRound], label_space: LabelSpace) -> dict[str, tuple[str, ...]]:
    """Label -> participating clients claiming it, in label-space then round order.

    Labels nobody claims this iteration are left out.
    """
    claims: dict[str, tuple[str, ...]] = {}
    for label in label_space:
        owners = tuple(r.client_id for r in rounds if label in r.labels)
        if owners:
            claims[label] = owners
    return claims


def assign_beta(rounds: Sequence[LocalRound], claims: Mapping[str, Sequence[str]], public: Dataset,
                accuracy: BetaAccuracy = BetaAccuracy.PER_LABEL) -> BetaAssignment:
    """Beta of 1 for a label with a single claimant, the claimant's accuracy otherwise."""
    by_client = {r.client_id: r for r in rounds}
    accuracies: dict[str, dict[str, float]] = {}

    def client_accuracy(round_: LocalRound, label: str) -> float:
        if round_.client_id not in accuracies:
            if accuracy is BetaAccuracy.SUBSET:
                overall = evaluate_user_accuracy(round_.updated_scores, public, round_.labels)
                accuracies[round_.client_id] = {c: overall for c in round_.labels}
            else:
                accuracies[round_.client_id] = per_label_accuracy(round_.updated_scores, public, round_.labels)
        return accuracies[round_.client_id][label]

    betas: dict[tuple[str, str], float] = {}
    for label, owners in claims.items():
        if not owners:
            raise UnclaimedLabel(f"label {label!r} has no participating client")
        missing = [c for c in owners if c not in by_client]
        if missing:
            raise UnclaimedLabel(f"label {label!r} is claimed by {missing} without a local round")
        if len(owners) == 1:
            betas[(owners[0], label)] = 1.0
            continue
        for client in owners:
            betas[(client, label)] = client_accuracy(by_client[client], label)
    return BetaAssignment(betas)


def global_update(rounds: Sequence[LocalRound], betas: BetaAssignment, label_space: LabelSpace,
                  previous: GlobalScoreState | None = None,
                  mode: AggregateMode = AggregateMode.NORMALIZED) -> GlobalScoreState:
    """Combine the clients' updated scores label by label into a new global state.

    In normalized mode each column is the beta-weighted mean of its claimants'
    columns; a column with no claimant or a zero beta sum keeps its previous
    value. In sum mode the beta-weighted sum is taken as is.
    """
    if previous is None and not rounds:
        raise NoParticipants("no local rounds and no previous global state")
    rows = previous.rows if previous is not None else rounds[0].updated_scores.rows
    for r in rounds:
        if r.updated_scores.rows != rows:
            raise ShapeMismatch(f"client {r.client_id} has {r.updated_scores.rows} rows, expected {rows}")
    iteration = previous.iteration + 1 if previous is not None else max(r.iteration for r in rounds)

    values = np.zeros((rows, len(label_space)))
    for k, label in enumerate(label_space):
        claimants = [r for r in rounds if label in r.labels]
        if not claimants:
            if previous is None:
                raise NoParticipants(f"label {label!r} has no claimant and no previous value")
            values[:, k] = previous.scores.values[:, k]
            continue

        column = np.zeros(rows)
        weight = 0.0
        for r in claimants:
            beta = betas.get(r.client_id, label)
            column += beta * r.updated_scores.column(label)
            weight += beta
        if mode is AggregateMode.SUM:
            values[:, k] = column
        elif weight > 0.0:
            values[:, k] = column / weight
        elif previous is not None:
            logger.debug("Zero beta sum for label %s; carrying previous column", label)
            values[:, k] = previous.scores.values[:, k]
        else:
            raise NoParticipants(f"label {label!r} has zero total beta and no previous value")

    return GlobalScoreState(iteration, ScoreMatrix(values, label_space.labels, label_space))
