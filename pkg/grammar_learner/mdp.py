"""
Mother daughter pair (MDP) frequencies, tree scoring and threshold filtering.
"""
import logging
import threading
from collections import Counter

import pandas as pd
from nltk import Tree
from scipy.stats import gmean

from grammar_learner.exceptions import FormatError

# Score for a pair never seen in training
DEFAULT_EPSILON = 1e-6

TOTAL_RECORD = 'TOTAL'


def _as_tree(tree):
    """
    :return: tree as an nltk Tree. Parse trees are converted to trees of display labels.
    """
    return tree if isinstance(tree, Tree) else tree.to_tree()


def extract_mdps(tree):
    """
    Extracts mother daughter pairs, one for each mother and non token daughter, in left to right preorder.
    :param tree: nltk Tree or ParseTree.
    :return: List of (mother label, daughter label).
    """
    pairs = []
    for node in _as_tree(tree).subtrees():
        for child in node:
            if isinstance(child, Tree):
                pairs.append((node.label(), child.label()))
    return pairs


class MdpTable:
    """
    Counts of mother daughter pairs. The score of a pair is its count over the total count of all pairs, or epsilon for
    pairs never seen. Training adds to the counts, so a table can be trained on more trees as they are found.
    """

    def __init__(self, counts=None, epsilon=DEFAULT_EPSILON):
        """
        :param counts: Optional initial counts, mapping (mother, daughter) to count.
        :param epsilon: Score for unseen pairs.
        """
        self.__log = logging.getLogger(__name__)
        self.__lock = threading.Lock()

        if not 0 < epsilon <= 1:
            raise ValueError(f"epsilon must be in (0, 1], not {epsilon}")
        self.epsilon = epsilon
        self.__counts = Counter()
        self.__total = 0
        for pair, count in (counts or {}).items():
            if count < 1:
                raise ValueError(f"Count for {pair} must be at least 1, not {count}")
            self.__counts[tuple(pair)] += count
            self.__total += count

    @property
    def total(self):
        return self.__total

    @property
    def counts(self):
        return dict(self.__counts)

    def count(self, mother, daughter):
        return self.__counts.get((mother, daughter), 0)

    def train(self, trees):
        """
        Adds the pairs of each tree to the counts.
        :param trees: nltk Trees or ParseTrees.
        :return: self
        """
        added = 0
        with self.__lock:
            for tree in trees:
                pairs = extract_mdps(tree)
                self.__counts.update(pairs)
                self.__total += len(pairs)
                added += len(pairs)

        self.__log.debug(f"Trained on {added} pairs. Table has {len(self.__counts)} pairs, total {self.__total}.")
        return self

    def f(self, pair):
        """
        :param pair: (mother label, daughter label)
        :return: count / total for a seen pair, epsilon otherwise.
        """
        count = self.__counts.get(tuple(pair), 0)
        if count == 0 or self.__total == 0:
            return self.epsilon
        return count / self.__total

    def score_tree(self, tree):
        """
        Scores a tree. A node with no non token daughters scores 1. Any other node scores the geometric mean, over its
        daughters D, of score(D) * f(node, D).
        :param tree: nltk Tree or ParseTree.
        :return: Score in (0, 1].
        """
        return self.__score(_as_tree(tree))

    def local_score(self, mother, daughters):
        """
        Scores a local tree whose daughters are complete subtrees.
        :param mother: Mother label.
        :param daughters: Daughter subtrees, nltk Trees or ParseTrees.
        :return: Score the mother would have over these daughters.
        """
        daughters = [_as_tree(daughter) for daughter in daughters]
        return self.__combine(mother, daughters)

    def __score(self, node):
        daughters = [child for child in node if isinstance(child, Tree)]
        if not daughters:
            return 1.0
        return self.__combine(node.label(), daughters)

    def __combine(self, mother, daughters):
        factors = [self.__score(daughter) * self.f((mother, daughter.label())) for daughter in daughters]
        if not factors:
            return 1.0
        return float(gmean(factors))

    def merge(self, other):
        """
        :return: A new table with the counts of both tables. Epsilon is taken from this table.
        """
        merged = MdpTable(self.__counts, epsilon=self.epsilon)
        for pair, count in other.counts.items():
            merged.__counts[pair] += count
            merged.__total += count
        return merged

    def copy(self, epsilon=None):
        """
        :param epsilon: Score for unseen pairs in the copy. Defaults to this table's.
        """
        return MdpTable(self.__counts, epsilon=self.epsilon if epsilon is None else epsilon)

    def to_frame(self):
        """
        :return: Dataframe with one row per pair, most frequent first.
        """
        data = [{'Mother': mother, 'Daughter': daughter, 'Count': count, 'Score': count / self.__total}
                for (mother, daughter), count in self.__counts.items()]
        frame = pd.DataFrame(columns=['Mother', 'Daughter', 'Count', 'Score'], data=data)
        return frame.sort_values(['Count', 'Mother', 'Daughter'], ascending=[False, True, True]).reset_index(drop=True)

    def save(self):
        """
        :return: The table as text. One 'mother daughter count' line per pair, sorted, then a 'TOTAL N' line.
        """
        lines = [f"{mother} {daughter} {count}\n" for (mother, daughter), count in sorted(self.__counts.items())]
        lines.append(f"{TOTAL_RECORD} {self.__total}\n")
        return ''.join(lines)

    @classmethod
    def load(cls, text, epsilon=DEFAULT_EPSILON, source=None):
        """
        Loads a table saved by save. The total must equal the sum of the counts.
        """
        counts = Counter()
        total = None
        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith('#'):
                continue
            parts = stripped.split()
            if parts[0] == TOTAL_RECORD and len(parts) == 2:
                if total is not None:
                    raise FormatError("more than one TOTAL record", source=source, line=number, column=1)
                total = _count(parts[1], source, number)
                continue
            if total is not None:
                raise FormatError("pair record after TOTAL record", source=source, line=number, column=1)
            if len(parts) != 3:
                raise FormatError("expected 'mother daughter count'", source=source, line=number, column=1)
            counts[(parts[0], parts[1])] += _count(parts[2], source, number)

        if total is None:
            raise FormatError("missing TOTAL record", source=source)
        if total != sum(counts.values()):
            raise FormatError(f"TOTAL {total} does not equal the sum of counts {sum(counts.values())}", source=source)

        return cls(counts, epsilon=epsilon)

    def __len__(self):
        return len(self.__counts)

    def __repr__(self):
        return f"MdpTable(pairs={len(self.__counts)}, total={self.__total}, epsilon={self.epsilon})"


def _count(text, source, number):
    if not text.isdigit() or int(text) < 1:
        raise FormatError(f"count must be a positive integer, not {text!r}", source=source, line=number)
    return int(text)


def train(table, trees):
    return table.train(trees)


def pretrain_table(trees, epsilon=DEFAULT_EPSILON, workers=1):
    """
    Trains a new table. With more than one worker the trees are split into contiguous chunks, each counted in its own
    thread, and the chunk tables are merged. The counts are the same whatever the number of workers.
    :param trees: nltk Trees or ParseTrees.
    :param epsilon: Score for unseen pairs.
    :param workers: Number of threads.
    :return: MdpTable
    """
    if workers < 1:
        raise ValueError(f"workers must be at least 1, not {workers}")

    trees = list(trees)
    if workers == 1 or len(trees) < 2:
        return MdpTable(epsilon=epsilon).train(trees)

    size = -(-len(trees) // workers)
    chunks = [trees[start:start + size] for start in range(0, len(trees), size)]
    tables = [MdpTable(epsilon=epsilon) for _ in chunks]
    errors = []

    def count(table, chunk):
        try:
            table.train(chunk)
        except Exception as ex:
            errors.append(ex)

    threads = [threading.Thread(target=count, args=(table, chunk), name=f"Pretrain-{number}")
               for number, (table, chunk) in enumerate(zip(tables, chunks))]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    if errors:
        raise errors[0]

    merged = tables[0]
    for table in tables[1:]:
        merged = merged.merge(table)
    return merged


def f(table, pair):
    return table.f(pair)


def score_tree(table, tree):
    return table.score_tree(tree)


def threshold_filter(candidates, table, threshold):
    """
    Keeps candidates whose daughters all score strictly above the threshold.
    :param candidates: (rule, local tree) pairs. The local tree's daughters are scored.
    :param table: MdpTable.
    :param threshold: In [0, 1].
    :return: Surviving candidates.
    """
    if not 0 <= threshold <= 1:
        raise ValueError(f"threshold must be in [0, 1], not {threshold}")

    survivors = []
    for rule, local_tree in candidates:
        daughters = [child for child in _as_tree(local_tree) if isinstance(child, Tree)]
        if all(table.score_tree(daughter) > threshold for daughter in daughters):
            survivors.append((rule, local_tree))
    return survivors
