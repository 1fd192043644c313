"""
Model based rejection and refinement of super rule instantiations: X-bar projection, the Head Feature Convention,
linear precedence rules and semantic type composition.
"""
import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import NamedTuple, Optional, Tuple

from grammar_learner.exceptions import FormatError
from grammar_learner.featcat import BAR, BAR_LEVELS, CAT, Category, label_of, unify
from grammar_learner.semtypes import compose, parse_type
from grammar_learner.status import Status

# Filter stages, used as keys in rejection tallies
STAGE_XBAR = 'xbar'
STAGE_HFC = 'hfc'
STAGE_LP = 'lp'
STAGE_SEMANTICS = 'semantics'
STAGES = (STAGE_XBAR, STAGE_HFC, STAGE_LP, STAGE_SEMANTICS)

SEMANTICS_OK = Status(0, 'ok', 'One daughter is a functor that takes the other as its argument')
SEMANTICS_REJECT = Status(1, 'reject', 'Neither daughter can take the other as its argument')
SEMANTICS_ABSTAIN = Status(2, 'abstain', 'A daughter has no semantic type, so no verdict is given')

COND_INSTANTIATED = 'instantiated'
COND_UNINSTANTIATED = 'uninstantiated'
COND_EQUALS = 'equals'

_CONDITION_PATTERNS = (
    (re.compile(r'^\[\s*([A-Za-z0-9_+\-]+)\s*\]$'), COND_INSTANTIATED),
    (re.compile(r'^~\s*\[\s*([A-Za-z0-9_+\-]+)\s*\]$'), COND_UNINSTANTIATED),
    (re.compile(r'^([A-Za-z0-9_+\-]+)\s*=\s*([A-Za-z0-9_+\-]+)$'), COND_EQUALS),
)
_XBAR_PATTERN = re.compile(r'^([A-Za-z][A-Za-z0-9]*)\s+([0-9]+)\s*->\s*(.*)$')
_SEMTYPE_PATTERN = re.compile(r'^semtype\s+(\S+)\s*=\s*(\S+)\s*$')

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureCondition:
    """
    A condition on one category: a feature is instantiated, is not instantiated, or has a value.
    """
    kind: str
    feature: str
    value: Optional[str] = None

    def matches(self, category):
        if self.kind == COND_INSTANTIATED:
            return self.feature in category
        if self.kind == COND_UNINSTANTIATED:
            return self.feature not in category
        return category.get(self.feature) == self.value

    @classmethod
    def parse(cls, text):
        """
        Parses '[F]', '~[F]' or 'F=v'.
        :raises ValueError: if text is none of these.
        """
        text = text.strip()
        for pattern, kind in _CONDITION_PATTERNS:
            match = pattern.match(text)
            if match is not None:
                return cls(kind, match.group(1), match.group(2) if kind == COND_EQUALS else None)
        raise ValueError(f"Bad feature condition {text!r}")

    def __str__(self):
        if self.kind == COND_INSTANTIATED:
            return f"[{self.feature}]"
        if self.kind == COND_UNINSTANTIATED:
            return f"~[{self.feature}]"
        return f"{self.feature}={self.value}"


@dataclass(frozen=True)
class LPRule:
    """
    A linear precedence rule. A daughter matching left must not follow a sister matching right.
    """
    left: FeatureCondition
    right: FeatureCondition

    def __str__(self):
        return f"{self.left} < {self.right}"


class LPViolation(NamedTuple):
    rule: LPRule
    positions: Tuple[int, int]


class SemanticVerdict(NamedTuple):
    status: Status
    functor_index: Optional[int] = None


@dataclass(frozen=True)
class ModelConfig:
    """
    The linguistic model. X-bar projection is always applied; the other components can be switched off.
    """
    features: frozenset = frozenset()
    lp_rules: Tuple[LPRule, ...] = ()
    semtypes: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    hfc_features: frozenset = frozenset()
    xbar: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    use_lp: bool = True
    use_semantics: bool = True
    use_hfc: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'features', frozenset(self.features))
        object.__setattr__(self, 'lp_rules', tuple(self.lp_rules))
        object.__setattr__(self, 'semtypes', MappingProxyType(dict(self.semtypes)))
        object.__setattr__(self, 'hfc_features', frozenset(self.hfc_features))
        object.__setattr__(self, 'xbar', MappingProxyType({key: tuple(bars) for key, bars in self.xbar.items()}))

    def xbar_only(self):
        """
        :return: This model with everything but X-bar projection switched off.
        """
        return replace(self, use_lp=False, use_semantics=False, use_hfc=False)

    def with_semtypes(self, semtypes):
        """
        :return: This model with extra label to type assignments. Labels the model already maps keep their type.
        """
        merged = dict(semtypes)
        merged.update(self.semtypes)
        return replace(self, semtypes=merged)


def check_lp(mother, daughters, rules):
    """
    Checks the order of the daughters of a local tree against linear precedence rules.
    :param mother: Mother category. Not constrained by LP rules.
    :param daughters: Daughter categories in order.
    :param rules: LPRules.
    :return: None if the order is allowed, otherwise the first LPViolation found.
    """
    for rule in rules:
        for later in range(1, len(daughters)):
            if not rule.left.matches(daughters[later]):
                continue
            for earlier in range(0, later):
                if rule.right.matches(daughters[earlier]):
                    return LPViolation(rule, (earlier, later))
    return None


def check_semantics(rule, semtypes, head_index=None):
    """
    Checks that the daughters' semantic types compose by function application.
    :param rule: The instantiated rule.
    :param semtypes: Map from display label to SemType.
    :param head_index: Daughter to try as the functor first. Defaults to the rule's head.
    :return: SemanticVerdict
    """
    if head_index is None:
        head_index = rule.head_index

    types = [semtypes.get(label_of(daughter)) for daughter in rule.rhs]
    if any(semtype is None for semtype in types):
        return SemanticVerdict(SEMANTICS_ABSTAIN)

    if rule.is_unary:
        mother_type = semtypes.get(label_of(rule.lhs))
        if mother_type is None:
            return SemanticVerdict(SEMANTICS_ABSTAIN)
        if types[0] == mother_type:
            return SemanticVerdict(SEMANTICS_OK, 0)
        return SemanticVerdict(SEMANTICS_REJECT)

    order = [0, 1] if head_index is None else [head_index, 1 - head_index]
    for functor in order:
        if compose(types[functor], types[1 - functor]) is not None:
            return SemanticVerdict(SEMANTICS_OK, functor)
    return SemanticVerdict(SEMANTICS_REJECT)


def apply_hfc(rule, head_index, features):
    """
    Applies the Head Feature Convention: head features instantiated on the head daughter are copied to the mother.
    :param rule: The instantiated rule.
    :param head_index: The head daughter.
    :param features: Names of the head features.
    :return: The rule with its mother refined, or None if the mother has a different value for a head feature.
    """
    head = rule.rhs[head_index]
    mother = rule.lhs
    copied = {}
    for name in sorted(features):
        value = head.get(name)
        if value is None:
            continue
        existing = mother.get(name)
        if existing is None:
            copied[name] = value
        elif existing != value:
            return None

    if not copied:
        return rule
    return rule.annotated(lhs=unify(mother, Category(copied)))


def projection_bars(cat, head_bar, table=None):
    """
    :param cat: The head's major category.
    :param head_bar: The head's bar level.
    :param table: Optional map from (cat, bar) to permitted mother bar levels.
    :return: The bar levels a mother projected from the head may have.
    """
    if table is not None and (cat, head_bar) in table:
        return tuple(table[(cat, head_bar)])
    # Lexical heads project to bar 1 or 2, phrasal heads to their own bar or higher
    lowest = max(head_bar, BAR_LEVELS[1])
    return tuple(bar for bar in BAR_LEVELS if bar >= lowest)


def project_xbar(rule, table=None):
    """
    Refines a rule so that its mother is a projection of a head daughter. Each daughter with an instantiated cat is
    tried as the head, unless the rule already names its head.
    :param rule: The instantiated rule.
    :param table: Optional projection table, see projection_bars.
    :return: Refined rules with head_index set, one per head and mother bar level. Empty if there is no possible head.
    """
    heads = range(len(rule.rhs)) if rule.head_index is None else [rule.head_index]

    refined = []
    for head_index in heads:
        head = rule.rhs[head_index]
        if head.cat is None:
            continue
        for bar in projection_bars(head.cat, head.bar or '0', table):
            mother = unify(rule.lhs, Category({CAT: head.cat, BAR: bar}))
            if mother is not None:
                refined.append(rule.annotated(lhs=mother, head_index=head_index))

    return refined


def filter_instantiations(candidates, model, tally=None):
    """
    Filters super rule instantiations through the model: X-bar projection, then HFC, then LP, then semantics.
    :param candidates: Instantiated rules.
    :param model: ModelConfig.
    :param tally: Optional Counter. Rejections are counted against each stage's name.
    :return: The surviving refinements, annotated with head and semantic functor.
    """
    if tally is None:
        tally = Counter()

    survivors = []
    for candidate in candidates:
        refinements = project_xbar(candidate, model.xbar)
        if not refinements:
            tally[STAGE_XBAR] += 1
            log.debug(f"Rejected {candidate.labels()}: no X-bar head.")
            continue

        for rule in refinements:
            if model.use_hfc:
                refined = apply_hfc(rule, rule.head_index, model.hfc_features)
                if refined is None:
                    tally[STAGE_HFC] += 1
                    log.debug(f"Rejected {rule.labels()}: head feature conflict.")
                    continue
                rule = refined

            if model.use_lp:
                violation = check_lp(rule.lhs, rule.rhs, model.lp_rules)
                if violation is not None:
                    tally[STAGE_LP] += 1
                    log.debug(f"Rejected {rule.labels()}: violates {violation.rule} at {violation.positions}.")
                    continue

            if model.use_semantics:
                verdict = check_semantics(rule, model.semtypes)
                if verdict.status == SEMANTICS_REJECT:
                    tally[STAGE_SEMANTICS] += 1
                    log.debug(f"Rejected {rule.labels()}: semantic types do not compose.")
                    continue
                if verdict.status == SEMANTICS_OK:
                    rule = rule.annotated(sem_functor_index=verdict.functor_index)

            survivors.append(rule)

    return survivors


def load_model(text, source=None):
    """
    Loads a model configuration. Lines are:
        features: f1, f2, ...
        lp: <condition> < <condition>
        semtype Label = <type>
        hfc: f1, f2, ...
        xbar: Cat bar -> bar, bar, ...
    '#' starts a comment line.
    :return: ModelConfig
    """
    def fail(message, number, column=1):
        raise FormatError(message, source=source, line=number, column=column)

    features = set()
    lp_lines = []
    semtypes = {}
    hfc = set()
    xbar = {}

    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue

        if stripped.startswith('semtype'):
            match = _SEMTYPE_PATTERN.match(stripped)
            if match is None:
                fail("expected 'semtype Label = type'", number)
            try:
                semtypes[match.group(1)] = parse_type(match.group(2))
            except FormatError as ex:
                fail(f"bad semantic type: {ex.message}", number, line.index(match.group(2)) + ex.offset + 1)
            continue

        keyword, sep, value = stripped.partition(':')
        keyword = keyword.strip()
        if not sep:
            fail(f"unknown model line {stripped!r}", number)

        if keyword == 'features':
            features.update(name.strip() for name in value.split(',') if name.strip())
        elif keyword == 'hfc':
            hfc.update(name.strip() for name in value.split(',') if name.strip())
        elif keyword == 'lp':
            left, sep, right = value.partition('<')
            if not sep:
                fail("expected 'lp: condition < condition'", number)
            try:
                lp_lines.append((number, LPRule(FeatureCondition.parse(left), FeatureCondition.parse(right))))
            except ValueError as ex:
                fail(str(ex), number)
        elif keyword == 'xbar':
            match = _XBAR_PATTERN.match(value.strip())
            if match is None:
                fail("expected 'xbar: Cat bar -> bars'", number)
            bars = tuple(bar.strip() for bar in match.group(3).split(',') if bar.strip())
            for bar in (match.group(2),) + bars:
                if bar not in BAR_LEVELS:
                    fail(f"invalid bar level {bar}", number)
            xbar[(match.group(1), match.group(2))] = bars
        else:
            fail(f"unknown model section {keyword!r}", number)

    # Patterns may only use declared features. With no declaration, anything goes.
    if features:
        for number, rule in lp_lines:
            for condition in (rule.left, rule.right):
                if condition.feature not in features:
                    fail(f"LP rule uses undeclared feature {condition.feature}", number)
        for name in hfc:
            if name not in features:
                raise FormatError(f"hfc uses undeclared feature {name}", source=source)

    return ModelConfig(features=frozenset(features), lp_rules=tuple(rule for _, rule in lp_lines), semtypes=semtypes,
                       hfc_features=frozenset(hfc), xbar=xbar)


def read_model_file(filename):
    with open(filename, 'r', encoding='utf-8') as file:
        return load_model(file.read(), source=filename)
