"""
Tagged sentences, benchmark trees and corpus splits, and their line oriented file formats.
"""
import glob
import logging
import os
import re
import sys
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from nltk import Tree
from nltk.tag import str2tuple

from grammar_learner.exceptions import FormatError, SplitError, UnknownTagError

TAG_SEPARATOR = '_'
SPLIT_SECTIONS = ('pretrain', 'train', 'test')

# '#' then whitespace, or a lone '#', starts a comment line. '#' then a name is a sentence id.
_COMMENT_PATTERN = re.compile(r'^#(\s|$)')
_ID_PATTERN = re.compile(r'^#(\S+)\s*')
_SECTION_PATTERN = re.compile(r'^\[(\w+)\]$')

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TaggedSentence:
    id: str
    tokens: Tuple[Tuple[str, str], ...]
    text: str = ''

    @property
    def words(self):
        return [word for word, _ in self.tokens]

    @property
    def tags(self):
        return [tag for _, tag in self.tokens]

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class BenchTree:
    id: str
    tree: Tree


@dataclass(frozen=True)
class CorpusSplit:
    """
    Three disjoint lists of sentence ids.
    """
    pretrain: Tuple[str, ...]
    train: Tuple[str, ...]
    test: Tuple[str, ...]

    def __post_init__(self):
        for name in SPLIT_SECTIONS:
            object.__setattr__(self, name, tuple(getattr(self, name)))

        seen = {}
        for name in SPLIT_SECTIONS:
            for sentence_id in getattr(self, name):
                if sentence_id in seen:
                    raise SplitError(f"Sentence {sentence_id} is in both {seen[sentence_id]} and {name}")
                seen[sentence_id] = name

    @property
    def sizes(self):
        return tuple(len(getattr(self, name)) for name in SPLIT_SECTIONS)


@dataclass(frozen=True)
class Corpus:
    """
    Sentences with their benchmark trees and split.
    """
    sentences: Tuple[TaggedSentence, ...]
    trees: Tuple[BenchTree, ...]
    split: CorpusSplit = None

    def sentence_map(self):
        return {sentence.id: sentence for sentence in self.sentences}

    def tree_map(self):
        return {bench.id: bench.tree for bench in self.trees}

    def select(self, ids):
        """
        :return: The sentences with the given ids, in the order of ids.
        """
        sentences = self.sentence_map()
        missing = [sentence_id for sentence_id in ids if sentence_id not in sentences]
        if missing:
            raise SplitError(f"Unknown sentence ids: {', '.join(missing)}")
        return [sentences[sentence_id] for sentence_id in ids]


def _is_comment(line):
    return _COMMENT_PATTERN.match(line) is not None


def load_tagged(text, tagset=None, source=None):
    """
    Loads tagged sentences. One sentence of word_TAG tokens per line, with an optional '#id' prefix. Sentences with no
    id are numbered by position from 1.
    :param text: File contents.
    :param tagset: Optional collection of allowed tags.
    :param source: File name, used in errors.
    :return: List of TaggedSentence.
    """
    sentences = []
    seen = set()
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or _is_comment(stripped):
            continue

        offset = len(line) - len(line.lstrip())
        sentence_id = None
        match = _ID_PATTERN.match(stripped)
        if match is not None:
            sentence_id = match.group(1)
            offset += match.end()
            stripped = stripped[match.end():]
        if sentence_id is None:
            sentence_id = str(len(sentences) + 1)
        if sentence_id in seen:
            raise FormatError(f"duplicate sentence id {sentence_id}", source=source, line=number, column=1)
        seen.add(sentence_id)

        tokens = []
        for token_match in re.finditer(r'\S+', stripped):
            token = token_match.group()
            word, tag = str2tuple(token, sep=TAG_SEPARATOR)
            if not word or not tag:
                raise FormatError(f"malformed token {token!r}, expected word{TAG_SEPARATOR}TAG", source=source,
                                  line=number, column=offset + token_match.start() + 1)
            if tagset is not None and tag not in tagset:
                raise UnknownTagError(tag, len(tokens), source=source)
            tokens.append((word, tag))

        if not tokens:
            raise FormatError(f"sentence {sentence_id} has no tokens", source=source, line=number, column=1)
        sentences.append(TaggedSentence(sentence_id, tuple(tokens), ' '.join(word for word, _ in tokens)))

    return sentences


def save_tagged(sentences):
    return ''.join(f"#{sentence.id} {' '.join(f'{word}{TAG_SEPARATOR}{tag}' for word, tag in sentence.tokens)}\n"
                   for sentence in sentences)


def load_trees(text, sentences=None, source=None):
    """
    Loads benchmark trees. One bracketed tree per line, with an optional '#id' prefix.
    :param text: File contents.
    :param sentences: Optional tagged sentences. Each tree's leaves must then align with its sentence's tokens.
    :param source: File name, used in errors.
    :return: List of BenchTree.
    """
    by_id = {sentence.id: sentence for sentence in sentences} if sentences is not None else None
    trees = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or _is_comment(stripped):
            continue

        tree_id = None
        match = _ID_PATTERN.match(stripped)
        if match is not None:
            tree_id = match.group(1)
            stripped = stripped[match.end():]
        if tree_id is None:
            tree_id = str(len(trees) + 1)

        try:
            tree = Tree.fromstring(stripped)
        except ValueError as ex:
            raise FormatError(f"bad tree for sentence {tree_id}: {ex}", source=source, line=number) from ex

        if by_id is not None:
            sentence = by_id.get(tree_id)
            if sentence is None:
                raise FormatError(f"no tagged sentence {tree_id} for tree", source=source, line=number)
            if len(tree.leaves()) != len(sentence):
                raise FormatError(f"tree for sentence {tree_id} has {len(tree.leaves())} leaves but the sentence has "
                                  f"{len(sentence)} tokens", source=source, line=number)
        trees.append(BenchTree(tree_id, tree))

    return trees


def save_trees(trees):
    return ''.join(f"#{bench.id} {bench.tree.pformat(margin=sys.maxsize)}\n" for bench in trees)


def load_split(text, source=None):
    """
    Loads a split. Ids are listed one or more per line under [pretrain], [train] and [test] headers.
    """
    sections = {name: [] for name in SPLIT_SECTIONS}
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        match = _SECTION_PATTERN.match(stripped)
        if match is not None:
            current = match.group(1)
            if current not in sections:
                raise FormatError(f"unknown section [{current}]", source=source, line=number, column=1)
            continue
        if current is None:
            raise FormatError("id before any section header", source=source, line=number, column=1)
        sections[current].extend(stripped.split())

    return CorpusSplit(**sections)


def save_split(split):
    lines = []
    for name in SPLIT_SECTIONS:
        lines.append(f"[{name}]\n")
        lines.extend(f"{sentence_id}\n" for sentence_id in getattr(split, name))
    return ''.join(lines)


def make_split(ids, sizes, seed):
    """
    Makes a pseudo random split of the ids. The same ids, sizes and seed always give the same split.
    :param ids: Sentence ids.
    :param sizes: (pretrain, train, test) sizes.
    :param seed: Random seed.
    :return: CorpusSplit
    """
    ids = list(ids)
    sizes = tuple(int(size) for size in sizes)
    if len(sizes) != len(SPLIT_SECTIONS) or any(size < 0 for size in sizes):
        raise SplitError(f"Split sizes must be three non negative numbers, not {sizes}")
    if sum(sizes) > len(ids):
        raise SplitError(f"Split sizes {sizes} need {sum(sizes)} sentences but there are only {len(ids)}")
    if len(set(ids)) != len(ids):
        raise SplitError("Sentence ids are not unique")

    order = np.random.default_rng(seed).permutation(len(ids))
    shuffled = [ids[index] for index in order]

    pretrain_end = sizes[0]
    train_end = pretrain_end + sizes[1]
    return CorpusSplit(pretrain=shuffled[:pretrain_end], train=shuffled[pretrain_end:train_end],
                       test=shuffled[train_end:train_end + sizes[2]])


def _read(filename):
    with open(filename, 'r', encoding='utf-8') as file:
        return file.read()


def read_tagged_file(filename, tagset=None):
    return load_tagged(_read(filename), tagset=tagset, source=filename)


def load_corpus(directory, name=None, tagset=None):
    """
    Loads a corpus directory holding name.tag, name.tre and name.split. The split file is optional.
    :param directory: The corpus directory.
    :param name: Base name of the files. Defaults to the first .tag file in the directory.
    :param tagset: Optional collection of allowed tags.
    :return: Corpus
    """
    if name is None:
        tagged = sorted(glob.glob(os.path.join(directory, '*.tag')))
        if not tagged:
            raise FileNotFoundError(f"No .tag file in {directory}")
        name = os.path.splitext(os.path.basename(tagged[0]))[0]

    base = os.path.join(directory, name)
    sentences = read_tagged_file(f"{base}.tag", tagset=tagset)
    trees = load_trees(_read(f"{base}.tre"), sentences=sentences, source=f"{base}.tre")

    split = None
    if os.path.exists(f"{base}.split"):
        split = load_split(_read(f"{base}.split"), source=f"{base}.split")

    log.info(f"Loaded corpus {name}: {len(sentences)} sentences, {len(trees)} trees.")
    return Corpus(tuple(sentences), tuple(trees), split)
