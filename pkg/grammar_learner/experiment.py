"""
The full experiment: split the corpus, pretrain, train each configuration, then measure coverage and plausibility of
each grammar on the test sentences.
"""
import logging
import math
import os
from dataclasses import dataclass, field

import pandas as pd

from grammar_learner.chartparser import DEFAULT_START, ParserBounds
from grammar_learner.corpusio import make_split
from grammar_learner.evalmetrics import DEFAULT_SAMPLE_K, coverage, parseable, plausibility_scores
from grammar_learner.featcat import format_category
from grammar_learner.grammar import write_grammar_file
from grammar_learner.learner import MDP_SOURCE_BENCHMARK, configuration, pretraining_trees, run_training
from grammar_learner.mdp import DEFAULT_EPSILON

DEFAULT_CONFIGS = ('A', 'B', 'C', 'D')
DEFAULT_SIZES = (18, 60, 60)
DEFAULT_SUBSET_SIZE = 15

REPORT_COLUMNS = ['Configuration', 'Grammar', 'Size', 'Coverage', 'Plausibility', 'Sentences Scored']
ABSENT = 'absent'

log = logging.getLogger(__name__)


@dataclass
class ExperimentReport:
    """
    Results of an experiment. rows has one row per configuration.
    """
    rows: pd.DataFrame
    settings: dict
    split: object
    plausible_ids: list
    yardstick_ids: list
    runs: dict = field(default_factory=dict)
    scores: dict = field(default_factory=dict)

    def table(self):
        """
        :return: The results as an aligned text table.
        """
        return self.rows.to_string(index=False, na_rep=ABSENT, float_format=lambda value: f"{value:.3f}")

    def records(self):
        """
        :return: The results as 'key=value' lines. Identical inputs give identical records.
        """
        lines = [f"{key}={value}" for key, value in self.settings.items()]
        for name, size in zip(('pretrain', 'train', 'test'), self.split.sizes):
            lines.append(f"split.{name}={size}")
        lines.append(f"plausible.size={len(self.plausible_ids)}")
        lines.append(f"plausible.ids={','.join(self.plausible_ids)}")
        lines.append(f"yardstick.size={len(self.yardstick_ids)}")
        lines.append(f"yardstick.ids={','.join(self.yardstick_ids)}")

        for row in self.rows.to_dict('records'):
            prefix = f"config.{row['Configuration']}"
            plausibility = row['Plausibility']
            lines.append(f"{prefix}.grammar={row['Grammar']}")
            lines.append(f"{prefix}.size={row['Size']}")
            lines.append(f"{prefix}.coverage={row['Coverage']:.1f}")
            lines.append(f"{prefix}.plausibility="
                         f"{ABSENT if plausibility is None or math.isnan(plausibility) else f'{plausibility:.6f}'}")

        for name, run in self.runs.items():
            for outcome in run.outcomes.to_dict('records'):
                lines.append(f"outcome.{name}.{outcome['Sentence']}={outcome['Verdict']} "
                             f"added={outcome['Rules Added']} edges={outcome['Edges']}")

        return ''.join(f"{line}\n" for line in lines)

    def write(self, directory):
        """
        Writes the report, learnt grammars, outcome logs and per sentence scores to a directory.
        :return: List of files written.
        """
        os.makedirs(directory, exist_ok=True)
        written = []

        def target(name):
            path = os.path.join(directory, name)
            written.append(path)
            return path

        with open(target('report.txt'), 'w', encoding='utf-8') as file:
            file.write(self.table() + '\n')
        with open(target('report.kv'), 'w', encoding='utf-8') as file:
            file.write(self.records())

        for name, run in self.runs.items():
            write_grammar_file(run.grammar, target(f"{run.grammar.name}.gram"))
            run.outcomes.to_csv(target(f"outcomes_{name}.csv"), index=False)
        for name, scores in self.scores.items():
            scores.to_csv(target(f"scores_{name}.csv"), index=False)

        return written


def run_experiment(corpus, grammar, lexicon, model, labelmap=None, configs=DEFAULT_CONFIGS, bounds=None,
                   threshold=0.0, epsilon=DEFAULT_EPSILON, seed=None, sizes=DEFAULT_SIZES,
                   sample_k=DEFAULT_SAMPLE_K, subset_size=DEFAULT_SUBSET_SIZE, mdp_source=MDP_SOURCE_BENCHMARK,
                   use_unary=False, parallel=False, start=DEFAULT_START):
    """
    Runs the experiment.
    :param corpus: Corpus with sentences, benchmark trees and, unless seed is given, a split.
    :param grammar: The seed grammar G.
    :param lexicon: Lexicon.
    :param model: ModelConfig.
    :param labelmap: Label map applied to trees before comparison and to benchmark trees before pretraining.
    :param configs: Names of the configurations to run.
    :param bounds: ParserBounds for training and evaluation.
    :param threshold: MDP threshold.
    :param epsilon: MDP score for unseen pairs.
    :param seed: If given, the corpus is split at random with this seed instead of using its split.
    :param sizes: Split sizes used with seed.
    :param sample_k: Parses sampled per sentence for plausibility.
    :param subset_size: Maximum size of the plausible and yardstick sets.
    :param mdp_source: Pretrain on benchmark trees or on the seed grammar's parses.
    :param use_unary: Complete parses with the unary super rule as well.
    :param parallel: Train configurations in parallel threads.
    :param start: Category a complete parse must unify with, in training and evaluation.
    :return: ExperimentReport
    """
    bounds = bounds if bounds is not None else ParserBounds()
    labelmap = labelmap or {}

    if seed is not None or corpus.split is None:
        split = make_split([sentence.id for sentence in corpus.sentences], sizes, seed if seed is not None else 0)
    else:
        split = corpus.split

    bench = corpus.tree_map()
    pretrain_sentences = corpus.select(split.pretrain)
    train_sentences = corpus.select(split.train)
    test_sentences = corpus.select(split.test)
    log.info(f"Split: {len(pretrain_sentences)} pretrain, {len(train_sentences)} train, {len(test_sentences)} test.")

    learner_configs = [configuration(name, threshold=threshold, bounds=bounds, epsilon=epsilon, mdp_source=mdp_source,
                                     use_unary=use_unary, start=start) for name in configs]

    trees = pretraining_trees(mdp_source, bench_trees=[bench[sentence.id] for sentence in pretrain_sentences],
                              sentences=pretrain_sentences, grammar=grammar, lexicon=lexicon, labelmap=labelmap,
                              bounds=bounds, start=start)
    log.info(f"Pretraining on {len(trees)} trees from {mdp_source}.")

    runs = run_training(grammar, lexicon, model, learner_configs, trees, train_sentences, parallel=parallel)

    # Sentences G parses form the yardstick. Sentences every learnt grammar parses but G does not are plausible.
    learnt_names = [config.name for config in learner_configs if config.learning]
    parsed_by_seed = [parseable(grammar, lexicon, sentence, bounds, start) for sentence in test_sentences]
    yardstick = [sentence for sentence, parsed in zip(test_sentences, parsed_by_seed) if parsed]
    plausible = []
    if learnt_names:
        for sentence, parsed in zip(test_sentences, parsed_by_seed):
            if not parsed and all(parseable(runs[name].grammar, lexicon, sentence, bounds, start)
                                  for name in learnt_names):
                plausible.append(sentence)
        size = min(subset_size, len(plausible))
        if not plausible:
            log.warning("No test sentence is parsed by every learnt grammar but not by G. Plausibility is absent.")
    else:
        size = min(subset_size, len(yardstick))
    plausible = plausible[:size]
    yardstick = yardstick[:size]

    data = []
    scores = {}
    for config in learner_configs:
        run = runs[config.name]
        scored = plausible if config.learning else yardstick
        value = float('nan')
        if scored:
            scores[config.name] = plausibility_scores(run.grammar, lexicon, scored, bench, bounds=bounds,
                                                      labelmap=labelmap, sample_k=sample_k, start=start)
            value = float(scores[config.name]['Closeness'].mean())
        data.append({'Configuration': config.name, 'Grammar': run.grammar.name, 'Size': len(run.grammar),
                     'Coverage': coverage(run.grammar, lexicon, test_sentences, bounds, start), 'Plausibility': value,
                     'Sentences Scored': len(scored)})

    settings = {'seed': seed if seed is not None else 'split', 'configs': ','.join(configs),
                'max_parses': bounds.max_parses, 'max_edges': bounds.max_edges, 'threshold': threshold,
                'epsilon': epsilon, 'sample_k': sample_k, 'subset_size': subset_size, 'mdp_source': mdp_source,
                'use_unary': str(use_unary).lower(), 'start': format_category(start)}

    report = ExperimentReport(pd.DataFrame(columns=REPORT_COLUMNS, data=data), settings, split,
                              [sentence.id for sentence in plausible], [sentence.id for sentence in yardstick],
                              runs=runs, scores=scores)
    log.info(f"Experiment complete.\n{report.table()}")
    return report
