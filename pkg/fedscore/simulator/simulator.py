from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from fedscore import logging as fedscore_logging
from fedscore import utils
from fedscore.core import Dataset, GlobalScoreState
from fedscore.data import (LabelPools, ReshuffleEvent, Shard, Standardizer, draw_shard,
                           generate_public, generate_synthetic, load_csv_dataset,
                           pools_from_dataset, slice_pools)
from fedscore.errors import ConfigInvalid
from fedscore.exchange import account_payload
from fedscore.learner import ArchSpec, TrainResult, learner_factory
from fedscore.protocol import (LocalRound, alpha, assign_beta, evaluate_user_accuracy, global_update,
                               label_claims, local_update, overall_accuracy)
from fedscore.simulator.simulator_types import (ClientConfig, ClientRecord, ExperimentConfig,
                                                ExperimentReport, IterationRecord)

logger = fedscore_logging.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ExperimentData:
    public: Dataset
    pools: LabelPools


def prepare_data(config: ExperimentConfig) -> ExperimentData:
    """Materialise the public set and private pools, standardised on the public set."""
    data = config.data
    label_space = config.label_space
    if data.source == "synthetic":
        public = generate_public(data.synthetic, label_space, data.public_per_label, config.master_seed)
        pools = generate_synthetic(data.synthetic, label_space, config.master_seed)
    else:
        public = load_csv_dataset(data.public_csv, label_space)
        private = load_csv_dataset(data.private_csv, label_space)
        if private.n_features != public.n_features:
            raise ConfigInvalid("data/private_csv",
                                f"{private.n_features} features, public set has {public.n_features}")
        pools = pools_from_dataset(private)

    missing = [label for label, count in public.label_counts().items() if count == 0]
    if missing:
        raise ConfigInvalid("data", f"public set has no examples of {missing}")

    if data.standardize:
        scaler = Standardizer.fit(public)
        public = scaler.apply(public)
        pools = scaler.apply_pools(pools)
    logger.debug("Public set: %d rows; private pools: %d rows", public.n_examples, pools.total_rows())
    return ExperimentData(public, pools)


@dataclass(frozen=True, eq=False)
class _LocalPhase:
    client: ClientConfig
    shard: Shard
    arch: ArchSpec
    arch_changed: bool
    train_result: TrainResult
    parameters: np.ndarray
    parameter_count: int
    round: LocalRound
    fresh_accuracy: float
    inference_seconds: float


class Simulator:
    """Drives the score-consensus protocol over the configured clients.

    Every random draw comes from a stream derived from ``(master_seed,
    client, iteration)``, so the result does not depend on how many
    workers run the local phases.
    """

    def __init__(self, config: ExperimentConfig, data: ExperimentData | None = None):
        self.config = config
        self.data = data if data is not None else prepare_data(config)
        self.plan = config.plan
        self._slices = slice_pools(self.data.pools, self.plan)
        # client -> (arch, trained parameters) of its last participation
        self._previous: dict[str, tuple[ArchSpec, np.ndarray]] = {}

    @property
    def public(self) -> Dataset:
        return self.data.public

    def initial_state(self) -> GlobalScoreState:
        return GlobalScoreState.initial(self.public.n_examples, self.config.label_space)

    def _local_phase(self, client: ClientConfig, state: GlobalScoreState, iteration: int) -> _LocalPhase:
        seed = self.config.master_seed
        client_idx = self.plan.client_index(client.client_id)
        shard = draw_shard(self.data.pools, self.plan, client.client_id, iteration, seed, self._slices)

        arch = client.arch_schedule.at(iteration)
        initial = None
        previous = self._previous.get(client.client_id)
        if self.config.warm_start and previous is not None and previous[0] == arch:
            initial = previous[1]
        learner = learner_factory(
            arch,
            self.data.pools.n_features,
            client.labels,
            self.config.label_space,
            seed=utils.derive_seed(seed, utils.STREAM_INIT, client_idx, iteration),
            initial_parameters=initial,
        )
        result = learner.fit(shard.dataset, client.train,
                             seed=utils.derive_seed(seed, utils.STREAM_BATCH, client_idx, iteration))

        fresh, inference_seconds = learner.timed_predict(self.public)

        a = alpha(shard.size, self.public.n_examples)
        updated = local_update(state, fresh, a, client.labels)
        round_ = LocalRound(client.client_id, iteration, fresh, updated, a, shard.size)
        return _LocalPhase(
            client=client,
            shard=shard,
            arch=arch,
            arch_changed=client.arch_schedule.changed_at(iteration),
            train_result=result,
            parameters=learner.parameters,
            parameter_count=learner.parameter_count,
            round=round_,
            fresh_accuracy=evaluate_user_accuracy(fresh, self.public, client.labels),
            inference_seconds=inference_seconds,
        )

    def _annotated_phase(self, client: ClientConfig, state: GlobalScoreState, iteration: int) -> _LocalPhase:
        try:
            return self._local_phase(client, state, iteration)
        except Exception as exc:
            exc.add_note(f"client={client.client_id} iteration={iteration}")
            raise

    def _record(self, phase: _LocalPhase, new_state: GlobalScoreState, betas: dict[str, float]) -> ClientRecord:
        client = phase.client
        round_ = phase.round
        payload = account_payload(client.client_id, round_.iteration, round_.updated_scores, phase.parameter_count)
        result = phase.train_result
        return ClientRecord(
            iteration=round_.iteration,
            client=client.client_id,
            labels=round_.labels,
            shard_size=round_.shard_size,
            label_counts={label: int(rows.size) for label, rows in phase.shard.pool_indices.items()},
            alpha=round_.alpha,
            arch=phase.arch.describe(),
            arch_changed=phase.arch_changed,
            parameter_count=phase.parameter_count,
            epochs_run=result.epochs_run,
            final_loss=result.final_loss,
            fresh_accuracy=phase.fresh_accuracy,
            local_update_accuracy=evaluate_user_accuracy(round_.updated_scores, self.public, client.labels),
            global_update_accuracy=evaluate_user_accuracy(new_state.scores, self.public, client.labels),
            betas=betas,
            score_payload_bytes=payload.score_payload_bytes,
            weight_payload_bytes=payload.weight_payload_bytes,
            train_seconds=result.seconds,
            seconds_per_epoch=result.seconds / result.epochs_run,
            inference_seconds=phase.inference_seconds,
        )

    def run_iteration(self, state: GlobalScoreState, iteration: int) -> tuple[GlobalScoreState, IterationRecord]:
        """One synchronous round: all local phases, then the aggregation barrier.

        Clients with an empty planned shard sit the iteration out.
        """
        if state.iteration != iteration - 1:
            raise ValueError(f"state is at iteration {state.iteration}, cannot run iteration {iteration}")
        participants = [
            c for c in self.config.clients if sum(self.plan.counts(c.client_id, iteration).values()) > 0
        ]
        active = {c.client_id for c in participants}
        skipped = tuple(c.client_id for c in self.config.clients if c.client_id not in active)
        for client_id in skipped:
            logger.info("Empty shard; sitting the iteration out",
                        extra=fedscore_logging.round_fields(iteration, client_id))

        workers = max(1, min(self.config.parallel_workers, len(participants) or 1))
        if workers == 1:
            phases = [self._annotated_phase(c, state, iteration) for c in participants]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                phases = list(pool.map(lambda c: self._annotated_phase(c, state, iteration), participants))

        rounds = [phase.round for phase in phases]
        try:
            claims = label_claims(rounds, self.config.label_space)
            betas = assign_beta(rounds, claims, self.public, self.config.beta_acc)
            new_state = global_update(rounds, betas, self.config.label_space, state, self.config.aggregate)
        except Exception as exc:
            exc.add_note(f"iteration={iteration}")
            raise

        records = []
        for phase in phases:
            client_id = phase.client.client_id
            self._previous[client_id] = (phase.arch, phase.parameters)
            records.append(self._record(phase, new_state, {
                label: betas.get(client_id, label) for label in phase.round.labels
            }))
            logger.debug("local %.4f global %.4f (%d epochs, %s)",
                         records[-1].local_update_accuracy, records[-1].global_update_accuracy,
                         records[-1].epochs_run, records[-1].arch,
                         extra=fedscore_logging.round_fields(iteration, client_id))

        reshuffles: list[ReshuffleEvent] = [event for phase in phases for event in phase.shard.reshuffles]
        record = IterationRecord(
            iteration=iteration,
            global_accuracy=overall_accuracy(new_state, self.public),
            clients=tuple(records),
            skipped=skipped,
            reshuffles=tuple(reshuffles),
        )
        return new_state, record

    def run(self) -> tuple[ExperimentReport, GlobalScoreState]:
        state = self.initial_state()
        iterations: list[IterationRecord] = []
        for iteration in range(1, self.config.iterations + 1):
            state, record = self.run_iteration(state, iteration)
            iterations.append(record)
            logger.info("Iteration %d/%d: global accuracy %.4f", iteration, self.config.iterations,
                        record.global_accuracy, extra=fedscore_logging.round_fields(iteration))
        report = ExperimentReport(
            name=self.config.name,
            master_seed=self.config.master_seed,
            labels=self.config.label_space.labels,
            clients=tuple(c.client_id for c in self.config.clients),
            aggregate=self.config.aggregate.value,
            beta_acc=self.config.beta_acc.value,
            iterations=tuple(iterations),
        )
        return report, state


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run all configured iterations from the all-zero global state."""
    report, _ = Simulator(config).run()
    return report
