"""
Rules, grammars, the lexicon and the grammar and lexicon file formats.
"""
import logging
import re
from collections import namedtuple
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from grammar_learner.exceptions import FormatError, UnknownTagError
from grammar_learner.featcat import EMPTY, Category, format_category, label_of, read_category
from grammar_learner.semtypes import parse_type

ORIGIN_SEED = 'seed'
ORIGIN_LEARNT = 'learnt'

# Rule annotations in grammar files. Positions are 1 based in files and 0 based in memory.
_ANNOTATION_PATTERN = re.compile(r'\{([^}]*)\}\s*$')
_LEXICON_LINE_PATTERN = re.compile(r'\s*tag\s+(\S+)\s')

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Rule:
    """
    A unification rule with one or two daughters. Two rules are equal when their categories are equal; annotations and
    origin are not part of rule identity.
    """
    lhs: Category
    rhs: Tuple[Category, ...]
    head_index: Optional[int] = None
    sem_functor_index: Optional[int] = None
    origin: str = ORIGIN_SEED
    key: tuple = field(init=False, repr=False)

    def __post_init__(self):
        rhs = tuple(self.rhs)
        object.__setattr__(self, 'rhs', rhs)
        if len(rhs) not in (1, 2):
            raise ValueError(f"A rule must have 1 or 2 daughters, not {len(rhs)}")
        for name in ('head_index', 'sem_functor_index'):
            index = getattr(self, name)
            if index is not None and not 0 <= index < len(rhs):
                raise ValueError(f"{name} {index} does not address a daughter of a rule with {len(rhs)} daughters")
        if self.origin not in (ORIGIN_SEED, ORIGIN_LEARNT):
            raise ValueError(f"Unknown rule origin {self.origin}")
        object.__setattr__(self, 'key', (self.lhs, rhs))

    @property
    def is_unary(self):
        return len(self.rhs) == 1

    @property
    def is_binary(self):
        return len(self.rhs) == 2

    @property
    def categories(self):
        return (self.lhs,) + self.rhs

    @property
    def head(self):
        return None if self.head_index is None else self.rhs[self.head_index]

    def annotated(self, **changes):
        """
        :return: A copy of the rule with the given fields changed.
        """
        return replace(self, **changes)

    def labels(self):
        """
        :return: The rule written with display labels only, e.g. 'VP -> V NP'.
        """
        return f"{label_of(self.lhs)} -> {' '.join(label_of(daughter) for daughter in self.rhs)}"

    def __eq__(self, other):
        if isinstance(other, Rule):
            return self.key == other.key
        return NotImplemented

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return format_rule(self)


SuperRules = namedtuple('SuperRules', ['binary', 'unary'])

_SUPER_RULES = SuperRules(binary=Rule(EMPTY, (EMPTY, EMPTY), origin=ORIGIN_LEARNT),
                           unary=Rule(EMPTY, (EMPTY,), origin=ORIGIN_LEARNT))


def super_rules():
    """
    :return: The binary super rule [] -> [] [] and the unary super rule [] -> [].
    """
    return _SUPER_RULES


class Grammar:
    """
    An immutable, ordered, duplicate free set of rules. Adding a rule returns a new grammar.
    """

    def __init__(self, rules=(), name='G'):
        """
        :param rules: Rules in order. Later duplicates of a rule are dropped.
        :param name: Name of the grammar, e.g. G or G1.
        """
        self.name = name

        unique = {}
        for rule in rules:
            unique.setdefault(rule.key, rule)
        self.__rules = tuple(unique.values())
        self.__keys = frozenset(unique)
        self.__binary = tuple(rule for rule in self.__rules if rule.is_binary)
        self.__unary = tuple(rule for rule in self.__rules if rule.is_unary)

    @property
    def rules(self):
        return self.__rules

    @property
    def binary_rules(self):
        return self.__binary

    @property
    def unary_rules(self):
        return self.__unary

    def add_rule(self, rule):
        """
        Adds a rule.
        :param rule:
        :return: (grammar, added). If an equal rule is already present the grammar is returned unchanged and added is
            False.
        """
        if rule.key in self.__keys:
            return self, False
        return Grammar(self.__rules + (rule,), name=self.name), True

    def without(self, rule):
        """
        :return: A new grammar without the given rule.
        """
        return Grammar((existing for existing in self.__rules if existing != rule), name=self.name)

    def renamed(self, name):
        return Grammar(self.__rules, name=name)

    def learnt_rules(self):
        return [rule for rule in self.__rules if rule.origin == ORIGIN_LEARNT]

    def __contains__(self, rule):
        return rule.key in self.__keys

    def __len__(self):
        return len(self.__rules)

    def __iter__(self):
        return iter(self.__rules)

    def __eq__(self, other):
        if isinstance(other, Grammar):
            return self.__rules == other.__rules
        return NotImplemented

    def __hash__(self):
        return hash(self.__rules)

    def __repr__(self):
        return f"Grammar(name={self.name!r}, size={len(self)})"


def add_rule(grammar, rule):
    """
    :return: (grammar, added). See Grammar.add_rule.
    """
    return grammar.add_rule(rule)


def format_rule(rule):
    """
    Formats a rule as one grammar file line.
    """
    text = f"{format_category(rule.lhs)} -> {' '.join(format_category(daughter) for daughter in rule.rhs)}"

    annotations = []
    if rule.head_index is not None:
        annotations.append(f"head={rule.head_index + 1}")
    if rule.sem_functor_index is not None:
        annotations.append(f"functor={rule.sem_functor_index + 1}")
    if rule.origin != ORIGIN_SEED:
        annotations.append(f"origin={rule.origin}")
    if annotations:
        text += f" {{{', '.join(annotations)}}}"

    return text


def parse_rule(text, source=None, line=None):
    """
    Parses one rule written as 'LHS -> RHS1 [RHS2] {head=i, functor=j}'.
    """
    def fail(message, column):
        raise FormatError(message, source=source, line=line, column=column)

    annotations = {}
    body = text
    match = _ANNOTATION_PATTERN.search(text)
    if match is not None:
        body = text[:match.start()]
        annotations = _parse_annotations(match.group(1), match.start(1) + 1, fail)

    arrow = body.find('->')
    if arrow < 0:
        fail("expected '->'", len(body.rstrip()) + 1)

    lhs, end = read_category(body[:arrow], 0, source=source, line=line)
    if body[end:arrow].strip():
        fail("expected one category before '->'", end + 1)

    rhs = []
    pos = arrow + 2
    while body[pos:].strip():
        category, pos = read_category(body, pos, source=source, line=line)
        rhs.append(category)
        if len(rhs) > 2:
            fail("ternary right hand side, rules have 1 or 2 daughters", arrow + 3)
    if not rhs:
        fail("expected a category after '->'", arrow + 3)

    for name in ('head', 'functor'):
        if name in annotations and not 1 <= annotations[name] <= len(rhs):
            fail(f"{name}={annotations[name]} does not address a daughter", match.start(1) + 1)

    return Rule(lhs, tuple(rhs),
                head_index=annotations['head'] - 1 if 'head' in annotations else None,
                sem_functor_index=annotations['functor'] - 1 if 'functor' in annotations else None,
                origin=annotations.get('origin', ORIGIN_SEED))


def _parse_annotations(text, column, fail):
    annotations = {}
    for part in text.split(','):
        if not part.strip():
            continue
        name, sep, value = part.partition('=')
        name, value = name.strip(), value.strip()
        if not sep:
            fail(f"expected name=value in annotation {part.strip()!r}", column)
        if name in ('head', 'functor'):
            if not value.isdigit():
                fail(f"{name} must be a daughter position, not {value!r}", column)
            annotations[name] = int(value)
        elif name == 'origin':
            if value not in (ORIGIN_SEED, ORIGIN_LEARNT):
                fail(f"unknown origin {value!r}", column)
            annotations[name] = value
        else:
            fail(f"unknown annotation {name!r}", column)
        column += len(part) + 1

    return annotations


def _content_lines(text):
    """
    Yields (line number, line) for lines that are not blank or comments.
    """
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith('#'):
            yield number, line


def load_grammar(text, name='G', source=None):
    """
    Loads a grammar from the grammar file format. One rule per line, '#' starts a comment line.
    :param text: File contents.
    :param name: Name for the grammar.
    :param source: File name, used in errors and warnings.
    :return: The grammar.
    """
    rules = []
    seen = set()
    for number, line in _content_lines(text):
        rule = parse_rule(line, source=source, line=number)
        if rule.key in seen:
            log.warning(f"{source or '<grammar>'}:{number}: duplicate rule {rule} ignored.")
            continue
        seen.add(rule.key)
        rules.append(rule)

    log.debug(f"Loaded grammar {name} with {len(rules)} rules from {source or '<grammar>'}.")
    return Grammar(rules, name=name)


def save_grammar(grammar):
    """
    :return: The grammar in the grammar file format.
    """
    return ''.join(f"{format_rule(rule)}\n" for rule in grammar)


def read_grammar_file(filename, name='G'):
    with open(filename, 'r', encoding='utf-8') as file:
        return load_grammar(file.read(), name=name, source=filename)


def write_grammar_file(grammar, filename):
    with open(filename, 'w', encoding='utf-8') as file:
        file.write(save_grammar(grammar))


@dataclass(frozen=True)
class LexEntry:
    """
    The category, and optionally the semantic type, that a part of speech tag stands for.
    """
    tag: str
    category: Category
    semtype: object = None


class Lexicon:
    """
    Maps part of speech tags to lexical entries. Tags are the terminal symbols of the grammar.
    """

    def __init__(self, entries=()):
        self.__entries = {}
        for entry in entries:
            if entry.tag in self.__entries:
                raise ValueError(f"Tag {entry.tag} has more than one lexical entry")
            self.__entries[entry.tag] = entry

    @property
    def tags(self):
        return list(self.__entries)

    def entry(self, tag, position=None):
        """
        :param tag:
        :param position: Position of the token carrying the tag, used in the error.
        :return: The LexEntry for the tag.
        :raises UnknownTagError: if the tag has no entry.
        """
        try:
            return self.__entries[tag]
        except KeyError:
            raise UnknownTagError(tag, position) from None

    def category(self, tag, position=None):
        return self.entry(tag, position).category

    def semtypes(self):
        """
        :return: Map from label to semantic type for entries that carry one.
        """
        return {label_of(entry.category): entry.semtype for entry in self.__entries.values()
                if entry.semtype is not None}

    def __contains__(self, tag):
        return tag in self.__entries

    def __len__(self):
        return len(self.__entries)

    def __iter__(self):
        return iter(self.__entries.values())


def load_lexicon(text, source=None):
    """
    Loads a lexicon. Lines are 'tag TAG Category [: semtype]'.
    :param text: File contents.
    :param source: File name, used in errors.
    :return: The lexicon.
    """
    entries = []
    seen = set()
    for number, line in _content_lines(text):
        match = _LEXICON_LINE_PATTERN.match(line)
        if match is None:
            raise FormatError("expected 'tag TAG Category'", source=source, line=number, column=1)
        tag = match.group(1)
        if tag in seen:
            raise FormatError(f"tag {tag} already has an entry", source=source, line=number,
                              column=match.start(1) + 1)
        seen.add(tag)

        category, end = read_category(line, match.end(), source=source, line=number)
        rest = line[end:].strip()
        semtype = None
        if rest:
            if not rest.startswith(':'):
                raise FormatError(f"unexpected text {rest!r}", source=source, line=number, column=end + 1)
            type_text = rest[1:].strip()
            try:
                semtype = parse_type(type_text)
            except FormatError as ex:
                raise FormatError(f"bad semantic type: {ex.message}", source=source, line=number,
                                  column=line.index(type_text) + ex.offset + 1) from ex
        entries.append(LexEntry(tag, category, semtype))

    return Lexicon(entries)


def save_lexicon(lexicon):
    lines = []
    for entry in lexicon:
        line = f"tag {entry.tag} {format_category(entry.category)}"
        if entry.semtype is not None:
            line += f" : {entry.semtype}"
        lines.append(line + '\n')
    return ''.join(lines)


def read_lexicon_file(filename):
    with open(filename, 'r', encoding='utf-8') as file:
        return load_lexicon(file.read(), source=filename)
