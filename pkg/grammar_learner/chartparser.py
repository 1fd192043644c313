"""
Bottom up chart parser over unification rules. Spans are filled shortest first. The parser stops when it has created the
maximum number of edges or found the maximum number of parses. In completion mode the super rules are added to the
grammar so that every tag sequence has at least one parse.
"""
import logging
import sys
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from nltk import Tree

from grammar_learner.featcat import Category, label_of, unify
from grammar_learner.grammar import Rule, super_rules
from grammar_learner.status import Status

HALT_EXHAUSTED = Status(0, 'exhausted', 'The chart was completed and every parse within the bounds was returned')
HALT_PARSE_BOUND = Status(1, 'parse_bound', 'The maximum number of parses was returned and more parses exist')
HALT_EDGE_BOUND = Status(2, 'edge_bound', 'The maximum number of edges was created before the chart was complete')

# Default start category, label S
DEFAULT_START = Category(cat='S', bar='2')


@dataclass(frozen=True)
class ParserBounds:
    """
    Resource bounds. None means unbounded.
    """
    max_parses: Optional[int] = 1
    max_edges: Optional[int] = 3000

    def __post_init__(self):
        for name in ('max_parses', 'max_edges'):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be at least 1, not {value}")


UNBOUNDED = ParserBounds(max_parses=None, max_edges=None)


@dataclass(frozen=True)
class ParseTree:
    """
    A parse tree. Each node carries its category as instantiated by its mother's rule, the rule that built it and
    whether that rule was a super rule. Lexical nodes have no rule and a single token child.
    """
    category: Category
    children: Tuple[object, ...]
    rule: Optional[Rule] = None
    from_super: bool = False

    @property
    def label(self):
        return label_of(self.category)

    @property
    def is_lexical(self):
        return self.rule is None

    def nodes(self):
        """
        :return: All nodes in preorder.
        """
        found = [self]
        for child in self.children:
            if isinstance(child, ParseTree):
                found.extend(child.nodes())
        return found

    def super_nodes(self):
        """
        :return: Nodes built by a super rule, in postorder.
        """
        found = []
        for child in self.children:
            if isinstance(child, ParseTree):
                found.extend(child.super_nodes())
        if self.from_super:
            found.append(self)
        return found

    def leaves(self):
        found = []
        for child in self.children:
            if isinstance(child, ParseTree):
                found.extend(child.leaves())
            else:
                found.append(child)
        return found

    def instantiated_rule(self):
        """
        :return: The local tree at this node as a rule: this node's category over its daughters' categories.
        """
        if self.is_lexical:
            raise ValueError("A lexical node has no local rule")
        daughters = tuple(child.category for child in self.children)
        if self.from_super:
            return Rule(self.category, daughters, origin=self.rule.origin)
        return Rule(self.category, daughters, head_index=self.rule.head_index,
                    sem_functor_index=self.rule.sem_functor_index, origin=self.rule.origin)

    def validate(self):
        """
        :return: True if every node's rule unifies with the node and with each of its daughters.
        """
        for node in self.nodes():
            if node.rule is None:
                if len(node.children) != 1 or isinstance(node.children[0], ParseTree):
                    return False
                continue
            if len(node.rule.rhs) != len(node.children) or unify(node.rule.lhs, node.category) is None:
                return False
            for slot, child in zip(node.rule.rhs, node.children):
                if not isinstance(child, ParseTree) or unify(slot, child.category) is None:
                    return False
        return True

    def to_tree(self):
        """
        :return: The tree as an nltk Tree labelled with display labels.
        """
        return Tree(self.label, [child.to_tree() if isinstance(child, ParseTree) else child
                                 for child in self.children])

    def __str__(self):
        return self.to_tree().pformat(margin=sys.maxsize)


class ParseResult(NamedTuple):
    trees: list
    edges: int
    halted_reason: Status


class Edge:
    """
    A complete constituent over a span. An edge is identified by its span, its rule and the rule's categories after
    unification with the daughters. Every way of building the same edge is kept as a derivation: a tuple holding, for
    each daughter, the edges that can fill it.
    """

    __slots__ = ('number', 'span', 'rule', 'category', 'daughters', 'derivations', 'from_super', 'token')

    def __init__(self, number, span, rule, category, daughters, derivation, from_super=False, token=None):
        self.number = number
        self.span = span
        self.rule = rule
        self.category = category
        self.daughters = daughters
        self.derivations = [] if derivation is None else [derivation]
        self.from_super = from_super
        self.token = token

    @property
    def is_lexical(self):
        return self.rule is None

    def __repr__(self):
        return f"Edge({self.number}, {self.span}, {label_of(self.category)})"


class _Cell:
    """
    The edges over one span, in creation order and grouped by category.
    """

    __slots__ = ('edges', 'groups', 'keys')

    def __init__(self):
        self.edges = []
        self.groups = {}
        self.keys = {}

    def add(self, key, edge):
        self.edges.append(edge)
        self.groups.setdefault(edge.category, []).append(edge)
        self.keys[key] = edge


class _EdgeBoundReached(Exception):
    pass


class _Costs:
    """
    Memoised number of super rule nodes in the cheapest derivation of each edge.
    """

    def __init__(self):
        self.__edge_costs = {}
        self.__ordered = {}

    def edge(self, edge):
        cost = self.__edge_costs.get(id(edge))
        if cost is None:
            if edge.is_lexical:
                cost = 0
            else:
                cost = min(self.derivation(edge, derivation) for derivation in edge.derivations)
            self.__edge_costs[id(edge)] = cost
        return cost

    def derivation(self, edge, derivation):
        return int(edge.from_super) + sum(min(self.edge(child) for child in group) for group in derivation)

    def ordered(self, group):
        """
        :return: The edges of a group, cheapest first. Ties keep creation order.
        """
        ordered = self.__ordered.get(id(group))
        if ordered is None:
            ordered = sorted(group, key=self.edge)
            self.__ordered[id(group)] = ordered
        return ordered


def _reaches(edge, target):
    """
    :return: True if target is edge or is used by any unary derivation below edge.
    """
    stack = [edge]
    seen = set()
    while stack:
        current = stack.pop()
        if current is target:
            return True
        if id(current) in seen:
            continue
        seen.add(id(current))
        for derivation in current.derivations:
            if len(derivation) == 1:
                stack.extend(derivation[0])
    return False


class ChartParser:
    """
    A chart parser for one grammar and lexicon. Parsers hold no per sentence state, so one parser may be used for many
    sentences, and parsers sharing a grammar may run in separate threads.
    """

    def __init__(self, grammar, lexicon, bounds=None, start=DEFAULT_START, completing=False, use_unary=False,
                 close_lexical_slots=True):
        """
        :param grammar: The grammar.
        :param lexicon: Maps tags to lexical categories.
        :param bounds: ParserBounds. Defaults to one parse and 3000 edges.
        :param start: Category that a complete parse must unify with.
        :param completing: Add the binary super rule to the grammar.
        :param use_unary: In completion mode, also add the unary super rule.
        :param close_lexical_slots: In completion mode, a super rule constituent may not fill a daughter of a grammar
            rule that is a lexical (bar 0) category.
        """
        self.__log = logging.getLogger(__name__)

        self.grammar = grammar
        self.lexicon = lexicon
        self.bounds = bounds if bounds is not None else ParserBounds()
        self.start = start
        self.completing = completing
        self.use_unary = use_unary
        self.close_lexical_slots = close_lexical_slots

        # Rules as (index, rule, is super rule). Index identifies the rule in edge keys.
        supers = super_rules()
        binary = [(rule, False) for rule in grammar.binary_rules]
        unary = [(rule, False) for rule in grammar.unary_rules]
        if completing:
            binary.append((supers.binary, True))
            if use_unary:
                unary.append((supers.unary, True))
        self.__binary = [(index, rule, is_super) for index, (rule, is_super) in enumerate(binary)]
        self.__unary = [(index + len(binary), rule, is_super) for index, (rule, is_super) in enumerate(unary)]

    def parse(self, tags, words=None):
        """
        Parses a tag sequence.
        :param tags: The tags of the sentence.
        :param words: Optional words to use as the leaves of the trees. Defaults to the tags.
        :return: ParseResult of trees, number of edges created and the reason the parser stopped.
        :raises UnknownTagError: if a tag is not in the lexicon.
        """
        tags = list(tags)
        words = tags if words is None else list(words)
        if len(words) != len(tags):
            raise ValueError(f"{len(words)} words for {len(tags)} tags")

        entries = [self.lexicon.entry(tag, position) for position, tag in enumerate(tags)]
        length = len(tags)
        if length == 0:
            return ParseResult([], 0, HALT_EXHAUSTED)

        cells = {}
        counter = [0]
        halted = HALT_EXHAUSTED
        try:
            for position, entry in enumerate(entries):
                cell = cells.setdefault((position, position + 1), _Cell())
                edge = self.__new_edge(counter, (position, position + 1), None, entry.category, (), None,
                                       token=words[position])
                cell.add(('lex', position), edge)
                self.__close_unary(counter, cell, (position, position + 1))

            for width in range(2, length + 1):
                for start in range(0, length - width + 1):
                    span = (start, start + width)
                    cell = cells.setdefault(span, _Cell())
                    self.__fill_binary(counter, cells, cell, span)
                    self.__close_unary(counter, cell, span)
        except _EdgeBoundReached:
            halted = HALT_EDGE_BOUND

        trees, more = self.__harvest(cells.get((0, length)))
        if more and halted == HALT_EXHAUSTED:
            halted = HALT_PARSE_BOUND

        self.__log.debug(f"Parsed {length} tags{' completing' if self.completing else ''}: {counter[0]} edges, "
                         f"{len(trees)} parses, halted {halted}.")

        return ParseResult(trees, counter[0], halted)

    def __new_edge(self, counter, span, rule, category, daughters, derivation, from_super=False, token=None):
        max_edges = self.bounds.max_edges
        if max_edges is not None and counter[0] >= max_edges:
            raise _EdgeBoundReached()
        edge = Edge(counter[0], span, rule, category, daughters, derivation, from_super=from_super, token=token)
        counter[0] += 1
        return edge

    def __slot_closed(self, is_super, slot, category):
        # Super rule constituents have the empty category
        return (self.completing and self.close_lexical_slots and not is_super and len(category) == 0
                and slot.bar == '0')

    def __fill_binary(self, counter, cells, cell, span):
        start, end = span
        for index, rule, is_super in self.__binary:
            left_slot, right_slot = rule.rhs
            for split in range(start + 1, end):
                left_cell = cells[(start, split)]
                right_cell = cells[(split, end)]
                for left_category, left_edges in left_cell.groups.items():
                    if self.__slot_closed(is_super, left_slot, left_category):
                        continue
                    left = unify(left_slot, left_category)
                    if left is None:
                        continue

                    for right_category, right_edges in right_cell.groups.items():
                        if self.__slot_closed(is_super, right_slot, right_category):
                            continue
                        right = unify(right_slot, right_category)
                        if right is None:
                            continue

                        key = (index, left, right)
                        derivation = (left_edges, right_edges)
                        existing = cell.keys.get(key)
                        if existing is not None:
                            existing.derivations.append(derivation)
                        else:
                            edge = self.__new_edge(counter, span, rule, rule.lhs, (left, right), derivation,
                                                   from_super=is_super)
                            cell.add(key, edge)

    def __close_unary(self, counter, cell, span):
        if not self.__unary:
            return

        agenda = deque(cell.edges)
        while agenda:
            child = agenda.popleft()
            for index, rule, is_super in self.__unary:
                slot = rule.rhs[0]
                if self.__slot_closed(is_super, slot, child.category):
                    continue
                daughter = unify(slot, child.category)
                if daughter is None:
                    continue

                key = (index, daughter)
                existing = cell.keys.get(key)
                if existing is not None:
                    # Another derivation of an existing edge, unless it would make the edge part of itself
                    if not _reaches(child, existing):
                        existing.derivations.append(([child],))
                    continue

                edge = self.__new_edge(counter, span, rule, rule.lhs, (daughter,), ([child],), from_super=is_super)
                cell.add(key, edge)
                agenda.append(edge)

    def __harvest(self, top):
        """
        Enumerates parses from the edges over the whole sentence.
        :return: (trees, more) where more is True if further parses exist beyond the parse bound.
        """
        if top is None:
            return [], False

        costs = _Costs()
        roots = []
        for edge in top.edges:
            category = unify(edge.category, self.start)
            if category is not None:
                roots.append((costs.edge(edge), edge.number, edge, category))
        roots.sort(key=lambda root: root[:2])

        max_parses = self.bounds.max_parses
        trees = []
        for _, _, edge, category in roots:
            for tree in self.__trees(edge, category, costs):
                if max_parses is not None and len(trees) >= max_parses:
                    return trees, True
                trees.append(tree)

        return trees, False

    def __trees(self, edge, category, costs):
        if edge.is_lexical:
            yield ParseTree(category, (edge.token,))
            return

        derivations = sorted(edge.derivations, key=lambda derivation: costs.derivation(edge, derivation))
        for derivation in derivations:
            for children in self.__children(derivation, edge.daughters, costs):
                yield ParseTree(category, children, edge.rule, edge.from_super)

    def __children(self, groups, daughters, costs):
        if not groups:
            yield ()
            return

        for child in costs.ordered(groups[0]):
            for subtree in self.__trees(child, daughters[0], costs):
                for rest in self.__children(groups[1:], daughters[1:], costs):
                    yield (subtree,) + rest


def parse(grammar, lexicon, tags, bounds=None, start=DEFAULT_START, words=None):
    """
    Parses a tag sequence with the grammar alone.
    :return: ParseResult
    """
    return ChartParser(grammar, lexicon, bounds=bounds, start=start).parse(tags, words=words)


def parse_completing(grammar, lexicon, tags, bounds=None, use_unary=False, start=DEFAULT_START, words=None,
                     close_lexical_slots=True):
    """
    Parses a tag sequence with the grammar plus the binary super rule, and the unary super rule if use_unary. Nodes
    built by a super rule are flagged in the returned trees.
    :return: ParseResult
    """
    return ChartParser(grammar, lexicon, bounds=bounds, start=start, completing=True, use_unary=use_unary,
                       close_lexical_slots=close_lexical_slots).parse(tags, words=words)
