import json
import os

from fedscore import logging as fedscore_logging
from fedscore import utils
from fedscore.config import parse_config
from fedscore.core import Dataset, LabelSpace
from fedscore.data import SyntheticSpec, generate_synthetic, write_csv_dataset
from fedscore.errors import InvalidSpec
from fedscore.report import emit_report, load_report, render_summary
from fedscore.simulator import ExperimentConfig, ExperimentReport, prepare_data, run_experiment, summarize

logger = fedscore_logging.get_logger(__name__)


def _setup(settings: dict, result_dir: str | None, log_dir_override: str | None,
           configure_logging: bool) -> None:
    if configure_logging:
        fedscore_logging.configure_logging(
            settings,
            result_dir=result_dir,
            log_dir_override=log_dir_override,
            force_reconfigure=True,
        )


def _log_config(config: ExperimentConfig, out_dir: str) -> None:
    logger.info("-------------FedScore Configuration-------------")
    logger.info("Experiment: %s", config.name)
    logger.info("Config file: %s", config.source_path)
    logger.info("Labels: %s", ", ".join(config.label_space.labels))
    logger.info("Clients: %s", ", ".join(c.client_id for c in config.clients))
    logger.info("Iterations: %d", config.iterations)
    logger.info("Master seed: %d", config.master_seed)
    logger.info("Aggregate: %s; beta accuracy: %s", config.aggregate.value, config.beta_acc.value)
    logger.info("Workers: %d; warm start: %s", config.parallel_workers, config.warm_start)
    logger.info("Output directory: %s", out_dir)
    logger.info("-------------End of Configuration-------------")


class FedScore:
    @classmethod
    def run(
        cls,
        *,
        config_path: str,
        out_dir: str | None = None,
        seed: int | None = None,
        workers: int | None = None,
        settings_file: str | None = None,
        log_dir_override: str | None = None,
        configure_logging: bool = True,
    ) -> ExperimentReport:
        settings = utils.try_load_config(settings_file)
        run_cfg = settings.get("run", {})
        out = out_dir if out_dir else os.path.join(os.getcwd(), run_cfg.get("out_dir", "fedscore_result"))
        os.makedirs(out, exist_ok=True)
        _setup(settings, out, log_dir_override, configure_logging)

        config = parse_config(config_path, seed_override=seed, workers_override=workers,
                              default_workers=int(run_cfg.get("workers", 1)))
        _log_config(config, out)
        report = run_experiment(config)
        emit_report(report, out)
        logger.info(render_summary(summarize(report), title=config.name).rstrip("\n"), extra={"plain": True})
        return report

    @classmethod
    def validate(
        cls,
        *,
        config_path: str,
        settings_file: str | None = None,
        log_dir_override: str | None = None,
        configure_logging: bool = True,
    ) -> ExperimentConfig:
        """Parse the config and materialise its data without training anything."""
        _setup(utils.try_load_config(settings_file), None, log_dir_override, configure_logging)
        config = parse_config(config_path)
        data = prepare_data(config)
        logger.info("%s: valid (%d clients, %d labels, %d iterations, %d public rows)",
                    config_path, len(config.clients), len(config.label_space), config.iterations,
                    data.public.n_examples)
        return config

    @classmethod
    def gen_data(
        cls,
        *,
        spec_path: str,
        out_path: str,
        seed: int,
        settings_file: str | None = None,
        log_dir_override: str | None = None,
        configure_logging: bool = True,
    ) -> Dataset:
        """Write synthetic label pools as a dataset CSV.

        Labels take the order they are declared in the synthetic data file.
        """
        _setup(utils.try_load_config(settings_file), None, log_dir_override, configure_logging)
        with open(spec_path, "r", encoding="utf-8") as handle:
            try:
                document = json.load(handle)
            except json.JSONDecodeError as exc:
                raise InvalidSpec(f"{spec_path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(document, dict) or not isinstance(document.get("labels"), dict):
            raise InvalidSpec(f"{spec_path}: expected an object with a 'labels' mapping")
        spec = SyntheticSpec.from_dict(document)
        label_space = LabelSpace(tuple(document["labels"]))
        dataset = generate_synthetic(spec, label_space, seed).as_dataset()
        write_csv_dataset(out_path, dataset)
        logger.info("Wrote %d rows x %d features to %s", dataset.n_examples, dataset.n_features, out_path)
        return dataset

    @classmethod
    def summarize(
        cls,
        *,
        report_path: str,
        settings_file: str | None = None,
        log_dir_override: str | None = None,
        configure_logging: bool = True,
    ) -> str:
        _setup(utils.try_load_config(settings_file), None, log_dir_override, configure_logging)
        report = load_report(report_path)
        table = render_summary(summarize(report), title=report.name)
        logger.info(table.rstrip("\n"), extra={"plain": True})
        return table
