"""
Interleaved parsing and learning. A sentence the grammar cannot parse is completed with the super rules, and the super
rule instantiations of the completed parse are filtered by the model and by the MDP data before being added to the
grammar.
"""
import logging
import threading
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional

import pandas as pd

from grammar_learner.chartparser import DEFAULT_START, ParserBounds, ParseTree, parse, parse_completing
from grammar_learner.evalmetrics import normalize
from grammar_learner.featcat import Category, label_of
from grammar_learner.grammar import ORIGIN_LEARNT, Rule
from grammar_learner.mdp import DEFAULT_EPSILON, MdpTable, pretrain_table, threshold_filter
from grammar_learner.modelfilter import filter_instantiations
from grammar_learner.status import Status

VERDICT_PARSED = Status(0, 'parsed_with_G', 'The grammar parses the sentence, nothing was learnt')
VERDICT_LEARNT = Status(1, 'learnt', 'The sentence was parsed with super rules and their instantiations were learnt')
VERDICT_UNGRAMMATICAL = Status(2, 'ungrammatical', 'No completed parse had all of its super rule instantiations '
                                                   'survive the filters')

# Rejection by the MDP threshold, alongside the model filter stages
STAGE_DATA = 'data'

MDP_SOURCE_BENCHMARK = 'benchmark'
MDP_SOURCE_PARSES = 'parses'

OUTCOME_COLUMNS = ['Sentence', 'Verdict', 'Rules Added', 'Rules', 'Edges', 'Halted', 'Candidates',
                   'Rejected XBar', 'Rejected HFC', 'Rejected LP', 'Rejected Semantics', 'Rejected Data']


@dataclass(frozen=True)
class LearnerConfig:
    """
    One learning configuration. X-bar projection is applied whenever learning is on, whatever model_on says.
    """
    name: str = 'D'
    grammar_name: str = 'G3'
    learning: bool = True
    model_on: bool = True
    data_on: bool = True
    threshold: float = 0.0
    bounds: ParserBounds = ParserBounds()
    start: Category = DEFAULT_START
    use_unary: bool = False
    epsilon: float = DEFAULT_EPSILON
    mdp_source: str = MDP_SOURCE_BENCHMARK

    def __post_init__(self):
        if not 0 <= self.threshold <= 1:
            raise ValueError(f"threshold must be in [0, 1], not {self.threshold}")
        if self.mdp_source not in (MDP_SOURCE_BENCHMARK, MDP_SOURCE_PARSES):
            raise ValueError(f"Unknown MDP source {self.mdp_source}")


# The four configurations: no learning, data driven only, model based only, both.
CONFIGURATIONS = {
    'A': LearnerConfig(name='A', grammar_name='G', learning=False, model_on=False, data_on=False),
    'B': LearnerConfig(name='B', grammar_name='G1', model_on=False, data_on=True),
    'C': LearnerConfig(name='C', grammar_name='G2', model_on=True, data_on=False),
    'D': LearnerConfig(name='D', grammar_name='G3', model_on=True, data_on=True),
}


def configuration(name, **settings):
    """
    :param name: A, B, C or D.
    :param settings: LearnerConfig fields to override, e.g. threshold or bounds.
    :return: The LearnerConfig.
    """
    try:
        return replace(CONFIGURATIONS[name], **settings)
    except KeyError:
        raise ValueError(f"Unknown configuration {name}. Must be one of {', '.join(CONFIGURATIONS)}") from None


@dataclass
class LearnOutcome:
    """
    What happened to one sentence.
    """
    sentence_id: str
    verdict: Status
    rules_added: tuple = ()
    rules: tuple = ()
    tree: Optional[ParseTree] = None
    edges: int = 0
    halted_reason: Optional[Status] = None
    candidates: int = 0
    rejections: Counter = field(default_factory=Counter)

    def record(self):
        """
        :return: The outcome as a dict keyed by outcome log column.
        """
        return {'Sentence': self.sentence_id, 'Verdict': str(self.verdict), 'Rules Added': len(self.rules_added),
                'Rules': '; '.join(rule.labels() for rule in self.rules), 'Edges': self.edges,
                'Halted': str(self.halted_reason) if self.halted_reason is not None else '',
                'Candidates': self.candidates,
                'Rejected XBar': self.rejections['xbar'], 'Rejected HFC': self.rejections['hfc'],
                'Rejected LP': self.rejections['lp'], 'Rejected Semantics': self.rejections['semantics'],
                'Rejected Data': self.rejections[STAGE_DATA]}


def _sentence_parts(sentence, default_id):
    """
    :return: (id, tags, words) for a TaggedSentence or a plain sequence of tags.
    """
    tags = getattr(sentence, 'tags', None)
    if tags is None:
        tags = list(sentence)
        return str(default_id), tags, tags
    return sentence.id, list(tags), list(sentence.words)


class Learner:
    """
    Learns rules from sentences in turn. The grammar and, when the data driven learner is on, the MDP table grow as
    sentences are learnt.
    """

    def __init__(self, grammar, lexicon, model, config, table=None):
        """
        :param grammar: The starting grammar. Renamed to the configuration's grammar name.
        :param lexicon: Lexicon.
        :param model: ModelConfig. Only X-bar projection is used if the configuration has the model off.
        :param config: LearnerConfig.
        :param table: MdpTable, trained in place. A new empty table is used if None.
        """
        self.__log = logging.getLogger(__name__)

        self.grammar = grammar.renamed(config.grammar_name)
        self.lexicon = lexicon
        self.config = config
        self.model = model if config.model_on else model.xbar_only()
        self.table = table if table is not None else MdpTable(epsilon=config.epsilon)
        self.outcomes = []

    def learn(self, sentence):
        """
        Parses a sentence and, if the grammar cannot parse it, learns from a completed parse.
        :param sentence: TaggedSentence or sequence of tags.
        :return: LearnOutcome
        """
        sentence_id, tags, words = _sentence_parts(sentence, len(self.outcomes))
        config = self.config

        result = parse(self.grammar, self.lexicon, tags, config.bounds, start=config.start, words=words)
        if result.trees:
            outcome = LearnOutcome(sentence_id, VERDICT_PARSED, tree=result.trees[0], edges=result.edges,
                                   halted_reason=result.halted_reason)
        elif not config.learning:
            outcome = LearnOutcome(sentence_id, VERDICT_UNGRAMMATICAL, edges=result.edges,
                                   halted_reason=result.halted_reason)
        else:
            outcome = self.__learn_from_completion(sentence_id, tags, words)

        self.outcomes.append(outcome)
        self.__log.debug(f"Config {config.name} sentence {sentence_id}: {outcome.verdict}, "
                         f"{len(outcome.rules_added)} rules added, {outcome.edges} edges.")
        return outcome

    def __learn_from_completion(self, sentence_id, tags, words):
        config = self.config
        completed = parse_completing(self.grammar, self.lexicon, tags, config.bounds, use_unary=config.use_unary,
                                     start=config.start, words=words)

        tally = Counter()
        generated = Counter()
        accepted = []
        for tree in completed.trees:
            if not tree.super_nodes():
                continue
            rules = []
            refined = self.__refine(tree, rules, tally, generated)
            if refined is not None:
                accepted.append((refined, rules))

        if not accepted:
            return LearnOutcome(sentence_id, VERDICT_UNGRAMMATICAL, edges=completed.edges,
                                halted_reason=completed.halted_reason, candidates=generated['candidates'],
                                rejections=tally)

        # Several accepted parses are only possible with more than one parse allowed. Take the best scoring.
        refined, rules = accepted[0]
        if config.data_on and len(accepted) > 1:
            scores = [self.table.score_tree(tree) for tree, _ in accepted]
            refined, rules = accepted[scores.index(max(scores))]

        added = []
        for rule in rules:
            self.grammar, was_added = self.grammar.add_rule(rule)
            if was_added:
                added.append(rule)

        if config.data_on:
            self.table.train([refined])

        return LearnOutcome(sentence_id, VERDICT_LEARNT, rules_added=tuple(added), rules=tuple(rules), tree=refined,
                            edges=completed.edges, halted_reason=completed.halted_reason,
                            candidates=generated['candidates'], rejections=tally)

    def __refine(self, node, rules, tally, generated):
        """
        Rebuilds a completed parse bottom up, replacing each super rule node by its chosen surviving instantiation.
        :return: The refined tree, or None as soon as one super rule node has no survivor.
        """
        if node.is_lexical:
            return node

        children = []
        for child in node.children:
            if isinstance(child, ParseTree):
                child = self.__refine(child, rules, tally, generated)
                if child is None:
                    return None
            children.append(child)
        children = tuple(children)

        if not node.from_super:
            return replace(node, children=children)

        generated['candidates'] += 1
        candidate = Rule(node.category, tuple(child.category for child in children), origin=ORIGIN_LEARNT)
        survivors = filter_instantiations([candidate], self.model, tally)

        if survivors and self.config.data_on:
            local_tree = ParseTree(candidate.lhs, children, candidate, True)
            if not threshold_filter([(candidate, local_tree)], self.table, self.config.threshold):
                tally[STAGE_DATA] += 1
                survivors = []

        if not survivors:
            return None

        chosen = survivors[0]
        if self.config.data_on and len(survivors) > 1:
            scores = [self.table.local_score(label_of(rule.lhs), children) for rule in survivors]
            chosen = survivors[scores.index(max(scores))]

        rules.append(chosen)
        return ParseTree(chosen.lhs, children, chosen, True)

    def outcome_frame(self):
        """
        :return: Dataframe with one row per sentence learnt so far.
        """
        return outcome_frame(self.outcomes)


def outcome_frame(outcomes):
    return pd.DataFrame(columns=OUTCOME_COLUMNS, data=[outcome.record() for outcome in outcomes])


def learn_sentence(grammar, config, model, table, sentence, lexicon):
    """
    Learns from one sentence.
    :return: (grammar after learning, LearnOutcome). The table is trained in place.
    """
    learner = Learner(grammar, lexicon, model, config, table=table)
    outcome = learner.learn(sentence)
    return learner.grammar.renamed(grammar.name), outcome


@dataclass
class TrainingRun:
    """
    The result of training one configuration.
    """
    config: LearnerConfig
    grammar: object
    table: MdpTable
    outcomes: pd.DataFrame


def pretraining_trees(source, bench_trees=(), sentences=(), grammar=None, lexicon=None, labelmap=None, bounds=None,
                      start=DEFAULT_START):
    """
    Trees to pretrain the MDP table on.
    :param source: MDP_SOURCE_BENCHMARK to use the benchmark trees, normalised with the label map, or
        MDP_SOURCE_PARSES to use the first parse the grammar gives each sentence.
    :return: List of nltk Trees.
    """
    if source == MDP_SOURCE_BENCHMARK:
        return [normalize(getattr(bench, 'tree', bench), labelmap) for bench in bench_trees]

    if source == MDP_SOURCE_PARSES:
        trees = []
        for sentence in sentences:
            _, tags, words = _sentence_parts(sentence, len(trees))
            result = parse(grammar, lexicon, tags, bounds, start=start, words=words)
            if result.trees:
                trees.append(result.trees[0].to_tree())
        return trees

    raise ValueError(f"Unknown MDP source {source}")


def train_configuration(grammar, lexicon, model, config, pretrain_trees, train_sentences, pretrained=None):
    """
    Pretrains the MDP table if the configuration is data driven, then learns from each training sentence in order.
    :param pretrained: MdpTable already trained on pretrain_trees. The configuration learns on a copy of it.
    :return: TrainingRun
    """
    log = logging.getLogger(__name__)

    table = MdpTable(epsilon=config.epsilon)
    if config.learning and config.data_on:
        if pretrained is not None:
            table = pretrained.copy(epsilon=config.epsilon)
        else:
            table = pretrain_table(pretrain_trees, epsilon=config.epsilon)

    learner = Learner(grammar, lexicon, model, config, table=table)
    if config.learning:
        for sentence in train_sentences:
            learner.learn(sentence)

    log.info(f"Configuration {config.name} produced grammar {learner.grammar.name} with {len(learner.grammar)} "
             f"rules from {len(grammar)}.")
    return TrainingRun(config, learner.grammar, learner.table, learner.outcome_frame())


def run_training(grammar, lexicon, model, configs, pretrain_trees, train_sentences, parallel=False):
    """
    Trains each configuration from the same starting grammar.
    :param grammar: Starting grammar.
    :param lexicon: Lexicon.
    :param model: ModelConfig.
    :param configs: LearnerConfigs.
    :param pretrain_trees: Trees for pretraining the MDP table of data driven configurations.
    :param train_sentences: Sentences to learn from, in order.
    :param parallel: Pretrain in chunks and train each configuration in its own thread. Results are the same as
        training in turn.
    :return: Dict of configuration name to TrainingRun, in the order of configs.
    """
    pretrain_trees = list(pretrain_trees)
    train_sentences = list(train_sentences)

    pretrained = None
    if any(config.learning and config.data_on for config in configs):
        pretrained = pretrain_table(pretrain_trees, workers=len(configs) if parallel else 1)

    if not parallel:
        return {config.name: train_configuration(grammar, lexicon, model, config, pretrain_trees, train_sentences,
                                                 pretrained=pretrained)
                for config in configs}

    results = {}
    errors = {}

    def train(config):
        try:
            results[config.name] = train_configuration(grammar, lexicon, model, config, pretrain_trees,
                                                       train_sentences, pretrained=pretrained)
        except Exception as ex:
            errors[config.name] = ex

    threads = [threading.Thread(target=train, args=(config,), name=f"Train-{config.name}") for config in configs]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    for config in configs:
        if config.name in errors:
            raise errors[config.name]

    return {config.name: results[config.name] for config in configs}
