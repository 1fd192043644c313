"""
Command line interface. Subcommands: parse, pretrain, learn, eval and experiment.
"""
import argparse
import logging
import os
import sys

import definitions
from grammar_learner.chartparser import ParserBounds, parse, parse_completing
from grammar_learner.corpusio import load_corpus, read_tagged_file
from grammar_learner.evalmetrics import coverage, parseable, plausibility_scores, read_labelmap_file
from grammar_learner.exceptions import GrammarLearnerError, SplitError
from grammar_learner.experiment import run_experiment
from grammar_learner.featcat import parse_category
from grammar_learner.grammar import read_grammar_file, read_lexicon_file, write_grammar_file
from grammar_learner.learner import (CONFIGURATIONS, Learner, MDP_SOURCE_BENCHMARK, MDP_SOURCE_PARSES, configuration,
                                     pretraining_trees)
from grammar_learner.mdp import MdpTable
from grammar_learner.modelfilter import read_model_file
from grammar_learner.settings import Config, configure_logging

EXIT_OK = 0
EXIT_NO_PARSE = 1
EXIT_ERROR = 2


def _data_file(key):
    return os.path.join(definitions.DATA_DIR, Config().get(f"data.{key}"))


def _help(key, fallback=None):
    return Config().help(key) or fallback


def _add_resource_args(parser, model=False):
    parser.add_argument('--grammar', default=_data_file('grammar'), help=_help('data.grammar'))
    parser.add_argument('--lexicon', default=_data_file('lexicon'), help=_help('data.lexicon'))
    if model:
        parser.add_argument('--model', default=_data_file('model'), help=_help('data.model'))


def _add_bounds_args(parser):
    parser.add_argument('--max-parses', type=int, default=Config().get('parser.max_parses'),
                        help=_help('parser.max_parses'))
    parser.add_argument('--max-edges', type=int, default=Config().get('parser.max_edges'),
                        help=_help('parser.max_edges'))
    parser.add_argument('--start', default=Config().get('parser.start'), help=_help('parser.start'))


def _add_learning_args(parser):
    parser.add_argument('--threshold', type=float, default=Config().get('learner.threshold'),
                        help=_help('learner.threshold'))
    parser.add_argument('--epsilon', type=float, default=Config().get('learner.epsilon'),
                        help=_help('learner.epsilon'))
    parser.add_argument('--unary', action='store_true', default=Config().get('learner.use_unary'),
                        help=_help('learner.use_unary'))
    parser.add_argument('--mdp-source', choices=[MDP_SOURCE_BENCHMARK, MDP_SOURCE_PARSES],
                        default=Config().get('learner.mdp_source'), help=_help('learner.mdp_source'))


def _add_corpus_args(parser):
    parser.add_argument('--corpus', default=os.path.join(definitions.DATA_DIR, Config().get('data.corpus')),
                        help=_help('data.corpus'))
    parser.add_argument('--labelmap', default=_data_file('labelmap'), help=_help('data.labelmap'))


def build_parser():
    """
    :return: The argument parser. Defaults come from the settings.
    """
    parser = argparse.ArgumentParser(prog='grammar_learner',
                                     description='Learn unification grammar rules from a tagged, parsed corpus.')
    parser.add_argument('--log', help='Write the debug log to this file.')
    subparsers = parser.add_subparsers(dest='command', required=True)

    parse_parser = subparsers.add_parser('parse', help='Parse tagged sentences and print the trees.')
    parse_parser.add_argument('sentences', help='File of tagged sentences.')
    _add_resource_args(parse_parser)
    _add_bounds_args(parse_parser)
    parse_parser.add_argument('--complete', action='store_true',
                              help='Complete parses with the super rules when the grammar fails.')
    parse_parser.add_argument('--unary', action='store_true', default=Config().get('learner.use_unary'),
                              help=_help('learner.use_unary'))
    parse_parser.set_defaults(handler=cmd_parse)

    pretrain_parser = subparsers.add_parser('pretrain', help='Train an MDP table on the pretrain sentences.')
    _add_resource_args(pretrain_parser)
    _add_corpus_args(pretrain_parser)
    _add_bounds_args(pretrain_parser)
    _add_learning_args(pretrain_parser)
    pretrain_parser.add_argument('--output', required=True, help='File to write the MDP table to.')
    pretrain_parser.set_defaults(handler=cmd_pretrain)

    learn_parser = subparsers.add_parser('learn', help='Learn rules from the train sentences with one configuration.')
    _add_resource_args(learn_parser, model=True)
    _add_corpus_args(learn_parser)
    _add_bounds_args(learn_parser)
    _add_learning_args(learn_parser)
    learn_parser.add_argument('--config', choices=list(CONFIGURATIONS), default='D',
                              help='Learning configuration: A none, B data driven, C model based, D both.')
    learn_parser.add_argument('--table', help='Pretrained MDP table. Pretrains from the corpus if not given.')
    learn_parser.add_argument('--output', required=True, help='File to write the learnt grammar to.')
    learn_parser.add_argument('--outcomes', help='CSV file to write the per sentence outcome log to.')
    learn_parser.set_defaults(handler=cmd_learn)

    eval_parser = subparsers.add_parser('eval', help='Measure coverage and plausibility of a grammar.')
    _add_resource_args(eval_parser)
    _add_corpus_args(eval_parser)
    _add_bounds_args(eval_parser)
    eval_parser.add_argument('--sample-k', type=int, default=Config().get('experiment.sample_k'),
                             help=_help('experiment.sample_k'))
    eval_parser.add_argument('--all', action='store_true',
                             help='Evaluate on every sentence in the corpus rather than the test set.')
    eval_parser.set_defaults(handler=cmd_eval)

    experiment_parser = subparsers.add_parser('experiment', help='Run the full experiment for configurations A to D.')
    _add_resource_args(experiment_parser, model=True)
    _add_corpus_args(experiment_parser)
    _add_bounds_args(experiment_parser)
    _add_learning_args(experiment_parser)
    experiment_parser.add_argument('--configs', default=','.join(Config().get('experiment.configs')),
                                   help=_help('experiment.configs'))
    experiment_parser.add_argument('--seed', type=int, default=Config().get('experiment.seed'),
                                   help=_help('experiment.seed'))
    experiment_parser.add_argument('--sample-k', type=int, default=Config().get('experiment.sample_k'),
                                   help=_help('experiment.sample_k'))
    experiment_parser.add_argument('--subset-size', type=int, default=Config().get('experiment.subset_size'),
                                   help=_help('experiment.subset_size'))
    experiment_parser.add_argument('--parallel', action='store_true', default=Config().get('learner.parallel'),
                                   help=_help('learner.parallel'))
    experiment_parser.add_argument('--output', help='Directory to write the report, grammars and logs to.')
    experiment_parser.set_defaults(handler=cmd_experiment)

    return parser


def _bounds(args):
    return ParserBounds(max_parses=args.max_parses, max_edges=args.max_edges)


def _split_sentences(corpus, name):
    if corpus.split is None:
        raise SplitError(f"Corpus has no split file, so there is no {name} set")
    return corpus.select(getattr(corpus.split, name))


def cmd_parse(args, out):
    """
    Parses each sentence and prints its trees, or NO PARSE.
    :return: 0 if every sentence parsed, 1 otherwise.
    """
    grammar = read_grammar_file(args.grammar)
    lexicon = read_lexicon_file(args.lexicon)
    sentences = read_tagged_file(args.sentences)
    start = parse_category(args.start)
    bounds = _bounds(args)

    status = EXIT_OK
    for sentence in sentences:
        if args.complete:
            result = parse_completing(grammar, lexicon, sentence.tags, bounds, use_unary=args.unary, start=start,
                                      words=sentence.words)
        else:
            result = parse(grammar, lexicon, sentence.tags, bounds, start=start, words=sentence.words)

        if result.trees:
            for tree in result.trees:
                print(f"#{sentence.id} {tree}", file=out)
        else:
            print(f"NO PARSE {sentence.id}", file=out)
            status = EXIT_NO_PARSE
        print(f"# {sentence.id} edges={result.edges} parses={len(result.trees)} halted={result.halted_reason}",
              file=out)

    return status


def cmd_pretrain(args, out):
    """
    Trains an MDP table on the corpus's pretrain sentences and writes it to a file.
    """
    corpus = load_corpus(args.corpus)
    labelmap = read_labelmap_file(args.labelmap)
    sentences = _split_sentences(corpus, 'pretrain')
    bench = corpus.tree_map()

    grammar = read_grammar_file(args.grammar) if args.mdp_source == MDP_SOURCE_PARSES else None
    lexicon = read_lexicon_file(args.lexicon) if args.mdp_source == MDP_SOURCE_PARSES else None
    trees = pretraining_trees(args.mdp_source, bench_trees=[bench[sentence.id] for sentence in sentences],
                              sentences=sentences, grammar=grammar, lexicon=lexicon, labelmap=labelmap,
                              bounds=_bounds(args), start=parse_category(args.start))
    table = MdpTable(epsilon=args.epsilon).train(trees)

    with open(args.output, 'w', encoding='utf-8') as file:
        file.write(table.save())
    print(f"Trained on {len(trees)} trees: {len(table)} pairs, total {table.total}. Written to {args.output}.",
          file=out)
    return EXIT_OK


def cmd_learn(args, out):
    """
    Learns from the corpus's train sentences with one configuration and writes the learnt grammar.
    """
    grammar = read_grammar_file(args.grammar)
    lexicon = read_lexicon_file(args.lexicon)
    model = read_model_file(args.model).with_semtypes(lexicon.semtypes())
    corpus = load_corpus(args.corpus)
    config = configuration(args.config, threshold=args.threshold, epsilon=args.epsilon, bounds=_bounds(args),
                           use_unary=args.unary, mdp_source=args.mdp_source, start=parse_category(args.start))

    if args.table is not None:
        with open(args.table, 'r', encoding='utf-8') as file:
            table = MdpTable.load(file.read(), epsilon=args.epsilon, source=args.table)
    else:
        sentences = _split_sentences(corpus, 'pretrain')
        bench = corpus.tree_map()
        trees = pretraining_trees(args.mdp_source, bench_trees=[bench[sentence.id] for sentence in sentences],
                                  sentences=sentences, grammar=grammar, lexicon=lexicon,
                                  labelmap=read_labelmap_file(args.labelmap), bounds=config.bounds,
                                  start=config.start)
        table = MdpTable(epsilon=args.epsilon)
        if config.data_on:
            table.train(trees)

    learner = Learner(grammar, lexicon, model, config, table=table)
    if config.learning:
        for sentence in _split_sentences(corpus, 'train'):
            learner.learn(sentence)

    write_grammar_file(learner.grammar, args.output)
    outcomes = learner.outcome_frame()
    if args.outcomes is not None:
        outcomes.to_csv(args.outcomes, index=False)

    verdicts = outcomes['Verdict'].value_counts().to_dict() if not outcomes.empty else {}
    print(f"Grammar {learner.grammar.name}: {len(learner.grammar)} rules ({len(grammar)} seed). "
          f"Verdicts: {', '.join(f'{verdict}={count}' for verdict, count in sorted(verdicts.items()))}.", file=out)
    return EXIT_OK


def cmd_eval(args, out):
    """
    Prints coverage of a grammar on the test sentences, and plausibility over those it parses.
    """
    grammar = read_grammar_file(args.grammar)
    lexicon = read_lexicon_file(args.lexicon)
    corpus = load_corpus(args.corpus)
    labelmap = read_labelmap_file(args.labelmap)
    bounds = _bounds(args)
    start = parse_category(args.start)

    sentences = list(corpus.sentences) if args.all else _split_sentences(corpus, 'test')
    covered = coverage(grammar, lexicon, sentences, bounds, start)
    parsed = [sentence for sentence in sentences if parseable(grammar, lexicon, sentence, bounds, start)]

    print(f"coverage={covered:.1f}", file=out)
    if parsed:
        scores = plausibility_scores(grammar, lexicon, parsed, corpus.tree_map(), bounds=bounds, labelmap=labelmap,
                                     sample_k=args.sample_k, start=start)
        print(scores.to_string(index=False, float_format=lambda value: f"{value:.3f}"), file=out)
        print(f"plausibility={scores['Closeness'].mean():.6f}", file=out)
    else:
        print("plausibility=absent", file=out)
    return EXIT_OK


def cmd_experiment(args, out):
    """
    Runs the experiment and prints the results table, writing the full report if an output directory is given.
    """
    grammar = read_grammar_file(args.grammar)
    lexicon = read_lexicon_file(args.lexicon)
    model = read_model_file(args.model).with_semtypes(lexicon.semtypes())
    corpus = load_corpus(args.corpus)
    labelmap = read_labelmap_file(args.labelmap)

    configs = [name.strip() for name in args.configs.split(',') if name.strip()]
    for name in configs:
        if name not in CONFIGURATIONS:
            raise ValueError(f"Unknown configuration {name}. Must be one of {', '.join(CONFIGURATIONS)}")

    report = run_experiment(corpus, grammar, lexicon, model, labelmap=labelmap, configs=configs,
                            bounds=_bounds(args), threshold=args.threshold, epsilon=args.epsilon, seed=args.seed,
                            sizes=tuple(Config().get('experiment.sizes', [18, 60, 60])), sample_k=args.sample_k,
                            subset_size=args.subset_size, mdp_source=args.mdp_source, use_unary=args.unary,
                            parallel=args.parallel, start=parse_category(args.start))

    print(report.table(), file=out)
    if args.output is not None:
        report.write(args.output)
        print(f"Report written to {args.output}.", file=out)
    return EXIT_OK


def main(argv=None, out=None, configure=False):
    """
    Runs a subcommand.
    :param argv: Arguments. Defaults to sys.argv[1:].
    :param out: Stream for results. Defaults to stdout.
    :param configure: Configure logging from the settings.
    :return: Exit status. 0 success, 1 a sentence had no parse, 2 usage or input error.
    """
    out = out if out is not None else sys.stdout
    if not Config().loaded:
        Config().load(definitions.CONFIG_FILE, meta=definitions.CONFIG_META_FILE)

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else EXIT_ERROR

    if configure:
        configure_logging(args.log or definitions.LOG_FILE)

    log = logging.getLogger(__name__)
    try:
        return args.handler(args, out)
    except (GrammarLearnerError, OSError, ValueError) as ex:
        log.error(str(ex))
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_ERROR
