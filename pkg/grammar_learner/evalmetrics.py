"""
Evaluation of grammars: coverage of a sentence set and plausibility of parses measured by closeness to benchmark trees.
"""
import logging

import pandas as pd
from nltk import Tree

from grammar_learner.chartparser import DEFAULT_START, ParserBounds, parse
from grammar_learner.exceptions import FormatError, UnparseableSentenceError

# Number of parses sampled per sentence for plausibility
DEFAULT_SAMPLE_K = 10

log = logging.getLogger(__name__)


def normalize(tree, labelmap=None):
    """
    Relabels a tree. Labels missing from the map are kept.
    :param tree: nltk Tree or ParseTree.
    :param labelmap: Dict from label to label.
    :return: A new nltk Tree with the same structure.
    """
    if not isinstance(tree, Tree):
        tree = tree.to_tree()
    labelmap = labelmap or {}

    def relabel(node):
        if not isinstance(node, Tree):
            return node
        return Tree(labelmap.get(node.label(), node.label()), [relabel(child) for child in node])

    return relabel(tree)


def walk(tree):
    """
    :return: Node labels in preorder. Token leaves are not included.
    """
    if not isinstance(tree, Tree):
        tree = tree.to_tree()
    return [node.label() for node in tree.subtrees()]


def longest_common_sublist(test_walk, bench_walk):
    """
    Finds the longest contiguous sublist common to both walks. Ties go to the leftmost start in the test walk, then the
    leftmost start in the benchmark walk.
    :return: (start in test walk, start in benchmark walk, length). Length is 0 if nothing is shared.
    """
    best = (0, 0, 0)
    previous = [0] * (len(bench_walk) + 1)
    for i in range(1, len(test_walk) + 1):
        current = [0] * (len(bench_walk) + 1)
        for j in range(1, len(bench_walk) + 1):
            if test_walk[i - 1] == bench_walk[j - 1]:
                current[j] = previous[j - 1] + 1
                length = current[j]
                start = (i - length, j - length)
                if length > best[2] or (length == best[2] and start < best[:2]):
                    best = (start[0], start[1], length)
        previous = current
    return best


def match_pieces(test_walk, bench_walk):
    """
    Repeatedly takes the longest common sublist out of the test walk until the test walk is empty or shares nothing
    with the benchmark walk. The benchmark walk is never changed.
    :return: List of the matched sublists, in the order they were found.
    """
    remaining = list(test_walk)
    pieces = []
    while remaining:
        test_start, _, length = longest_common_sublist(remaining, bench_walk)
        if length == 0:
            break
        pieces.append(remaining[test_start:test_start + length])
        del remaining[test_start:test_start + length]
    return pieces


def closeness(test, bench, labelmap=None):
    """
    Closeness of a test tree to a benchmark tree: the mean length of the matched pieces of the preorder walks, divided
    by the length of the benchmark walk. 1 for identical trees, 0 if no label is shared.
    :param test: nltk Tree or ParseTree.
    :param bench: nltk Tree or ParseTree.
    :param labelmap: Applied to both trees before comparison.
    :return: Score in [0, 1].
    """
    bench_walk = walk(normalize(bench, labelmap))
    test_walk = walk(normalize(test, labelmap))

    pieces = match_pieces(test_walk, bench_walk)
    if not pieces:
        return 0.0
    return sum(len(piece) for piece in pieces) / len(pieces) / len(bench_walk)


def _parts(sentence):
    return sentence.id, list(sentence.tags), list(sentence.words)


def parseable(grammar, lexicon, sentence, bounds=None, start=DEFAULT_START):
    """
    :return: True if the grammar parses the sentence as start within the bounds.
    """
    _, tags, words = _parts(sentence)
    return bool(parse(grammar, lexicon, tags, bounds, start=start, words=words).trees)


def coverage(grammar, lexicon, sentences, bounds=None, start=DEFAULT_START):
    """
    :return: Percentage of the sentences the grammar parses, to one decimal place.
    """
    sentences = list(sentences)
    if not sentences:
        return 0.0
    parsed = sum(1 for sentence in sentences if parseable(grammar, lexicon, sentence, bounds, start))
    log.debug(f"Grammar {grammar.name} parsed {parsed} of {len(sentences)} sentences.")
    return round(100 * parsed / len(sentences), 1)


def plausibility_scores(grammar, lexicon, sentences, bench_trees, bounds=None, labelmap=None,
                        sample_k=DEFAULT_SAMPLE_K, start=DEFAULT_START):
    """
    Scores each sentence by the closeness of its most plausible parse among the first sample_k.
    :param bench_trees: Dict from sentence id to benchmark tree.
    :return: Dataframe with columns Sentence, Parses and Closeness.
    :raises UnparseableSentenceError: if the grammar does not parse a sentence.
    """
    bounds = bounds if bounds is not None else ParserBounds()
    sample_bounds = ParserBounds(max_parses=sample_k, max_edges=bounds.max_edges)

    data = []
    for sentence in sentences:
        sentence_id, tags, words = _parts(sentence)
        if sentence_id not in bench_trees:
            raise FormatError(f"no benchmark tree for sentence {sentence_id}")
        result = parse(grammar, lexicon, tags, sample_bounds, start=start, words=words)
        if not result.trees:
            raise UnparseableSentenceError(sentence_id, str(result.halted_reason))
        bench = bench_trees[sentence_id]
        best = max(closeness(tree, bench, labelmap) for tree in result.trees)
        data.append({'Sentence': sentence_id, 'Parses': len(result.trees), 'Closeness': best})

    return pd.DataFrame(columns=['Sentence', 'Parses', 'Closeness'], data=data)


def plausibility(grammar, lexicon, sentences, bench_trees, bounds=None, labelmap=None, sample_k=DEFAULT_SAMPLE_K,
                 start=DEFAULT_START):
    """
    :return: Mean over the sentences of the best closeness among each sentence's first sample_k parses.
    """
    scores = plausibility_scores(grammar, lexicon, sentences, bench_trees, bounds=bounds, labelmap=labelmap,
                                 sample_k=sample_k, start=start)
    if scores.empty:
        raise ValueError("plausibility needs at least one sentence")
    return float(scores['Closeness'].mean())


def load_labelmap(text, source=None):
    """
    Loads a label map. Lines are 'from to' pairs.
    :return: Dict from label to label.
    """
    labelmap = {}
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise FormatError("expected 'from to'", source=source, line=number, column=1)
        if parts[0] in labelmap and labelmap[parts[0]] != parts[1]:
            raise FormatError(f"label {parts[0]} is mapped twice", source=source, line=number, column=1)
        labelmap[parts[0]] = parts[1]
    return labelmap


def read_labelmap_file(filename):
    with open(filename, 'r', encoding='utf-8') as file:
        return load_labelmap(file.read(), source=filename)
