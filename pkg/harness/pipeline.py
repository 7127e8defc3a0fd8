"""
The full experiment: datasets, reward table, restriction, forward training,
evaluation and report. Every stage leaves an artefact whose digest is stored
as a StageCheckpoint; a rerun skips stages whose artefact is unchanged and
redoes the first missing stage and everything after it.
"""

import hashlib
import json
import logging
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
from django.conf import settings

from bandit.buffer import BanditBuffer
from bandit.environment import SolverEnvironment
from bandit.policies import NetPolicy, placeholder_schedule
from bandit.training import architecture_for, forward_training, neural_ucb_train
from bandit.ucb import UcbState
from bnc.runs import SolveTask, reference_results, run_solves
from bnc.schedule import default_schedule
from core.exceptions import ConfigurationError
from instances.generators import generate
from instances.io import read_instances, write_instance
from metrics.stats import aggregate
from model.checkpoint import load_net, save_net
from model.net import RewardNet
from separators.config import NUM_SEPARATORS, SeparatorConfig
from subspace.restriction import restrict_subspace
from subspace.sampling import sample_initial_configs
from subspace.serializers import RestrictedSubspaceSerializer
from subspace.table import RewardTable, build_reward_table, read_table, write_table
from .baselines import (EvalContext, Evaluation, evaluate_methods, gap_limit, instance_agnostic_config,
                        prune_config, run_baseline)
from .config import SPLITS
from .models import ExperimentRun, StageCheckpoint
from .report import write_report
from .serializers import EvaluationSerializer, ExperimentConfigSerializer

logger = logging.getLogger(__name__)

STAGES = ('gen', 'table', 'restrict', 'train', 'evaluate', 'report')
TRADEOFF_THRESHOLDS = (-math.inf, -0.5, -0.25, 0.0, 0.1, 0.2)


def file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_json(data, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=1))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigurationError(f'{path} does not exist; run the earlier stages first.') from exc


def read_subspace(path):
    serializer = RestrictedSubspaceSerializer(data=read_json(path))
    if not serializer.is_valid():
        raise ConfigurationError(f'Invalid subspace {path}: {json.dumps(serializer.errors)}')
    return serializer.save()


def read_evaluation(path):
    serializer = EvaluationSerializer(data=read_json(path))
    if not serializer.is_valid():
        raise ConfigurationError(f'Invalid evaluation {path}: {json.dumps(serializer.errors)}')
    return serializer.save()


class Pipeline:

    def __init__(self, config, out_dir=None, n_jobs=None):
        self.config = config
        self.out = Path(out_dir) if out_dir is not None else Path(settings.L2SEP['OUTPUT_DIR']) / config.name
        self.n_jobs = n_jobs
        self.run = None

    # ── bookkeeping ─────────────────────────────────────────────────────────

    def artefact(self, stage):
        return {
            'gen': self.out / 'data' / 'manifest.json',
            'table': self.out / 'table.csv',
            'restrict': self.out / 'subspace.json',
            'train': self.out / 'nets' / 'manifest.json',
            'evaluate': self.out / 'evaluation.json',
            'report': self.out / 'report' / 'results.csv',
        }[stage]

    def start(self):
        document = ExperimentConfigSerializer(self.config).data
        self.run, created = ExperimentRun.objects.get_or_create(
            name=self.config.name,
            defaults={
                'class_tag': self.config.class_tag,
                'seed': self.config.seed,
                'config': document,
                'output_dir': str(self.out),
            },
        )
        if not created and self.run.config != document:
            raise ConfigurationError(f'Run {self.config.name!r} exists with a different config.')
        self.run.status = 'running'
        self.run.save()
        return self.run

    def is_current(self, stage):
        checkpoint = StageCheckpoint.objects.filter(run=self.run, stage=stage).first()
        path = self.artefact(stage)
        return checkpoint is not None and path.exists() and file_digest(path) == checkpoint.digest

    def record(self, stage):
        path = self.artefact(stage)
        StageCheckpoint.objects.update_or_create(
            run=self.run, stage=stage,
            defaults={'path': str(path), 'digest': file_digest(path), 'seed': self.config.seed},
        )

    def run_all(self):
        """Run every stage that is not checkpointed; returns the report directory."""
        self.start()
        rerun = False
        try:
            for stage in STAGES:
                if not rerun and self.is_current(stage):
                    logger.info('Stage %s is checkpointed; skipped', stage)
                    continue
                rerun = True
                logger.info('Stage %s of %s (seed %d)', stage, self.config.name, self.config.seed)
                getattr(self, f'stage_{stage}')()
                self.record(stage)
        except Exception:
            self.run.status = 'failed'
            self.run.save()
            raise
        self.run.status = 'done'
        self.run.save()
        return self.artefact('report').parent

    # ── artefacts ───────────────────────────────────────────────────────────

    def split(self, name):
        return read_instances(self.out / 'data' / name)

    def subspace(self):
        return read_subspace(self.artefact('restrict'))

    def references(self, instances):
        return [result.measure(self.config.metric)
                for result in reference_results(instances, self.config.params, self.n_jobs)]

    def nets(self):
        manifest = read_json(self.artefact('train'))
        nets_dir = self.artefact('train').parent
        nets = [load_net(nets_dir / f'net_{j}.json') for j in range(manifest['steps'])]
        states = [UcbState.load(nets_dir / f'ucb_{j}.npz', net) for j, net in enumerate(nets)]
        subspaces = {int(j): [SeparatorConfig(bits) for bits in configs]
                     for j, configs in manifest['subspaces'].items()}
        return nets, states, manifest, subspaces

    # ── stages ──────────────────────────────────────────────────────────────

    def stage_gen(self):
        manifest = {}
        for split in SPLITS:
            seeds = self.config.split_seeds(split)
            names = []
            for i, seed in enumerate(seeds):
                instance = generate(self.config.class_tag, seed, full_size=self.config.full_size)
                write_instance(instance, self.out / 'data' / split / f'{i:05d}_{instance.name}.json')
                names.append(instance.name)
            manifest[split] = {'seeds': seeds, 'instances': names}
            logger.info('Split %s: %d instances', split, len(seeds))
        write_json(manifest, self.artefact('gen'))

    def stage_table(self):
        small = self.split('small')
        params = self.config.params
        references = self.references(small)
        rows = {}

        def table_rows(configs):
            missing = [config for config in configs if config not in rows]
            if missing:
                table = build_reward_table(missing, small, params, repetitions=self.config.run_cfg.repetitions,
                                           n_jobs=self.n_jobs, references=references)
                rows.update(zip(missing, table.values))
            return np.array([rows[config] for config in configs])

        configs = sample_initial_configs(NUM_SEPARATORS, self.config.n_random, self.config.hamming_radius,
                                         self.config.seed, lambda configs: table_rows(configs).mean(axis=1))
        table = RewardTable(configs, [instance.name for instance in small], table_rows(configs))
        write_table(table, self.out / 'table')

    def stage_restrict(self):
        table = read_table(self.out / 'table')
        threshold = -math.inf if self.config.threshold is None else self.config.threshold
        subspace = restrict_subspace(table, self.config.subspace_size, threshold)
        agnostic = instance_agnostic_config(table)
        if agnostic not in subspace:
            logger.warning('Instance-agnostic config %s is not in the subspace (b=%s)', agnostic, threshold)
        write_json(RestrictedSubspaceSerializer(subspace).data, self.artefact('restrict'))

    def second_subspace(self, first_net, first_configs, update_round):
        """Restriction at the second update, with the first update decided by `first_net`."""
        small = self.split('small')
        table = read_table(self.out / 'table')
        params = self.config.params
        run_cfg = self.config.run_cfg
        columns, flagged = [], []
        for instance, t0 in zip(small, self.references(small)):
            policy = NetPolicy(instance, [first_net], first_configs, run_cfg.sep_feat)
            cell = build_reward_table(table.configs, [instance], params,
                                      schedule_prefix=placeholder_schedule((0,)), update_round=update_round,
                                      repetitions=run_cfg.repetitions, n_jobs=self.n_jobs,
                                      references=[t0], prefix_policy=policy)
            columns.append(cell.values[:, 0])
            flagged.append(cell.flagged[:, 0])
        second = RewardTable(table.configs, table.instances, np.column_stack(columns), update_round,
                             flagged=np.column_stack(flagged))
        nets_dir = self.artefact('train').parent
        write_table(second, nets_dir / 'table_1')
        threshold = -math.inf if self.config.threshold is None else self.config.threshold
        subspace = restrict_subspace(second, self.config.subspace_size, threshold)
        write_json(RestrictedSubspaceSerializer(subspace).data, nets_dir / 'subspace_1.json')
        return subspace.configs

    def stage_train(self):
        large = self.split('large')
        configs = self.subspace().configs
        run_cfg = self.config.run_cfg
        run_cfg.validate(len(configs))
        seed = self.config.seed
        nets_dir = self.artefact('train').parent
        nets_dir.mkdir(parents=True, exist_ok=True)
        for stale in [*nets_dir.glob('buffer_*.jsonl'), nets_dir / 'metrics.jsonl']:
            stale.unlink(missing_ok=True)
        env = SolverEnvironment(self.config.params, run_cfg.update_rounds, configs, run_cfg.sep_feat,
                                run_cfg.repetitions, n_jobs=self.n_jobs)
        metrics_path = nets_dir / 'metrics.jsonl'
        subspaces = {j: configs for j in range(run_cfg.steps)}

        if not self.config.resubspace_at_update2:
            steps = forward_training(large, configs, run_cfg, env, seed, metrics_path, buffer_dir=nets_dir)
        else:
            steps = []
            for j in range(run_cfg.steps):
                if j == 1:
                    second = self.second_subspace(steps[0].net, configs, run_cfg.update_rounds[1])
                    references = env.references
                    env = SolverEnvironment(self.config.params, run_cfg.update_rounds, second,
                                            run_cfg.sep_feat, run_cfg.repetitions, n_jobs=self.n_jobs,
                                            subspaces={0: configs})
                    env.references = references
                    subspaces.update({k: second for k in range(1, run_cfg.steps)})
                net = RewardNet(architecture_for(run_cfg), seed=seed + j)
                buffer = BanditBuffer(path=nets_dir / f'buffer_{j}.jsonl')
                steps.append(neural_ucb_train(large, subspaces[j], net, [step.net for step in steps],
                                              run_cfg, env, seed, buffer=buffer, metrics_path=metrics_path))

        for j, step in enumerate(steps):
            save_net(step.net, nets_dir / f'net_{j}.json')
            step.state.save(nets_dir / f'ucb_{j}.npz')
        write_json({
            'steps': len(steps),
            'update_rounds': list(run_cfg.update_rounds),
            'sep_feat': run_cfg.sep_feat,
            'subspaces': {str(j): [config.bits for config in subspaces[j]] for j in range(len(steps))},
        }, self.artefact('train'))

    def context(self, testset, strategy='point'):
        """Shared evaluation context: one default reference per instance."""
        config = self.config
        params = config.params
        small = self.split('small')
        nets, states, manifest, subspaces = self.nets()
        small_defaults = reference_results(small, params, self.n_jobs)
        test_defaults = reference_results(testset, params, self.n_jobs)
        ctx = EvalContext(
            params=params,
            references={i.name: r.measure(config.metric) for i, r in zip(testset, test_defaults)},
            objective=config.objective,
            subspace=self.subspace().configs,
            subspaces=subspaces,
            nets=nets,
            states=states,
            strategy=strategy,
            update_rounds=tuple(manifest['update_rounds']),
            sep_feat=manifest['sep_feat'],
            prune=prune_config(small_defaults),
            agnostic=instance_agnostic_config(read_table(self.out / 'table')),
            seed=config.seed,
            n_jobs=self.n_jobs,
        )
        if config.objective == 'gap':
            limit = gap_limit([r.measure(config.metric) for r in small_defaults], config.gap_limit_fraction)
            ctx.gap_params = replace(params, effort_limit=limit)
            tasks = [SolveTask(instance, default_schedule(), ctx.gap_params) for instance in testset]
            ctx.reference_gaps = {i.name: r.gap for i, r in zip(testset, run_solves(tasks, self.n_jobs))}
            logger.info('Gap objective: limit %.1f (%.0f%% of the median default)',
                        limit, 100 * config.gap_limit_fraction)
        return ctx

    def choose_strategy(self):
        """Point or UCB inference, whichever has the higher median on the validation split."""
        if self.config.inference_strategy != 'validate':
            return self.config.inference_strategy
        ctx = self.context(self.split('valid'))
        medians = {}
        for strategy in ('point', 'ucb'):
            ctx.strategy = strategy
            medians[strategy] = aggregate([s.delta for s in run_baseline('l2sep', self.split('valid'), ctx)])['median']
        chosen = 'ucb' if medians['ucb'] > medians['point'] else 'point'
        logger.info('Validation medians %s; inference uses %s', medians, chosen)
        return chosen

    def stage_evaluate(self):
        strategy = self.choose_strategy()
        testset = self.split('test')
        results = evaluate_methods(self.config.methods, testset, self.context(testset, strategy))
        evaluation = Evaluation(self.config.objective, strategy, results)
        write_json(EvaluationSerializer(evaluation).data, self.artefact('evaluate'))

    def stage_report(self):
        evaluation = read_evaluation(self.artefact('evaluate'))
        write_report(evaluation.results, self.artefact('report').parent, evaluation.objective,
                     subspace=self.subspace().configs, table=read_table(self.out / 'table'),
                     thresholds=TRADEOFF_THRESHOLDS, size=self.config.subspace_size)
