"""
Flat feature bundle categories, their unification and their display labels.
"""
import re
import sys
from functools import lru_cache

from grammar_learner.exceptions import FormatError

# Distinguished features
CAT = 'cat'
BAR = 'bar'
BAR_LEVELS = ('0', '1', '2')

# Label for a category whose major class is not instantiated
UNKNOWN_LABEL = '?'

# Projection table exceptions. Any (cat, bar) not listed here uses the suffix rules in label_of.
FIXED_LABELS = {('S', '2'): 'S'}
_FIXED_FEATURES = {label: cat_bar for cat_bar, label in FIXED_LABELS.items()}

_LABEL_PATTERN = re.compile(r'[A-Za-z][A-Za-z0-9]*')
_SYMBOL_PATTERN = re.compile(r'[A-Za-z0-9_+\-]+')


class Category:
    """
    An immutable set of feature/value pairs. Names and values are atomic, interned strings. The empty category is legal
    and is the identity for unification.
    """

    __slots__ = ('__features', '__key', '__hash')

    def __init__(self, features=None, **kwargs):
        """
        :param features: Mapping or iterable of (name, value) pairs.
        :param kwargs: More features. Override those in features.
        """
        items = dict(features or {})
        items.update(kwargs)

        interned = []
        for name, value in items.items():
            if not isinstance(name, str) or not name:
                raise TypeError(f"Feature name must be a non empty string, not {name!r}")
            if isinstance(value, int) and not isinstance(value, bool):
                value = str(value)
            if not isinstance(value, str) or not value:
                raise TypeError(f"Feature {name} must have an atomic value, not {value!r}")
            if name == BAR and value not in BAR_LEVELS:
                raise ValueError(f"Invalid bar level {value}. Must be one of {', '.join(BAR_LEVELS)}")
            interned.append((sys.intern(name), sys.intern(value)))

        self.__key = tuple(sorted(interned))
        self.__features = dict(self.__key)
        self.__hash = hash(self.__key)

    @property
    def key(self):
        """
        :return: Canonical form. Feature/value pairs sorted by feature name.
        """
        return self.__key

    @property
    def cat(self):
        return self.__features.get(CAT)

    @property
    def bar(self):
        return self.__features.get(BAR)

    def get(self, name, default=None):
        return self.__features.get(name, default)

    def items(self):
        return iter(self.__key)

    def names(self):
        return [name for name, _ in self.__key]

    def as_dict(self):
        return dict(self.__features)

    def with_features(self, **features):
        """
        :return: A new category with the given features added or replaced.
        """
        merged = dict(self.__features)
        merged.update(features)
        return Category(merged)

    def subsumes(self, other):
        """
        :return: True if every feature/value pair of this category appears in other.
        """
        return all(other.get(name) == value for name, value in self.__key)

    def __contains__(self, name):
        return name in self.__features

    def __len__(self):
        return len(self.__key)

    def __bool__(self):
        return True

    def __eq__(self, other):
        if isinstance(other, Category):
            return self.__hash == other.__hash and self.__key == other.__key
        return NotImplemented

    def __hash__(self):
        return self.__hash

    def __lt__(self, other):
        return self.__key < other.__key

    def __str__(self):
        return format_category(self)

    def __repr__(self):
        return f"Category('{format_category(self)}')"

    @classmethod
    def parse(cls, text, source=None):
        return parse_category(text, source=source)


# The empty category, "[ ]"
EMPTY = Category()


@lru_cache(maxsize=65536)
def unify(a, b):
    """
    Unifies two categories.
    :param a:
    :param b:
    :return: The category holding the union of both feature sets, or None if any feature shared by both has different
        values.
    """
    if len(b) == 0 or a is b:
        return a
    if len(a) == 0:
        return b

    merged = a.as_dict()
    for name, value in b.items():
        existing = merged.get(name)
        if existing is None:
            merged[name] = value
        elif existing is not value and existing != value:
            return None

    return Category(merged)


def label_of(category):
    """
    The display label of a category, built from its cat and bar features. Minor features are not part of the label.
    :param category:
    :return: e.g. 'NP' for cat=N, bar=2; 'N1' for cat=N, bar=1; 'N' for cat=N, bar=0. '?' if cat is uninstantiated.
    """
    cat = category.cat
    if cat is None:
        return UNKNOWN_LABEL

    bar = category.bar
    fixed = FIXED_LABELS.get((cat, bar))
    if fixed is not None:
        return fixed
    if bar == '2':
        return cat + 'P'
    if bar == '1':
        return cat + '1'
    return cat


def label_features(label):
    """
    The reverse of label_of.
    :param label: A display label such as 'NP', 'N1' or 'Det'.
    :return: (cat, bar) for the label.
    """
    fixed = _FIXED_FEATURES.get(label)
    if fixed is not None:
        return fixed
    if len(label) > 1 and label.endswith('P'):
        return label[:-1], '2'
    if len(label) > 1 and label.endswith('1'):
        return label[:-1], '1'
    return label, '0'


def category_of_label(label, **features):
    """
    :return: The category for a display label, with any extra features added.
    """
    cat, bar = label_features(label)
    return Category(features, cat=cat, bar=bar)


def format_category(category):
    """
    Formats a category in the textual syntax. The label form is used when the label reads back as the same cat and bar,
    otherwise all features are written in brackets.
    :param category:
    :return: e.g. 'NP[num=sg, per=3]', 'S[]' or '[per=3]'
    """
    label = label_of(category)
    use_label = category.cat is not None and label_features(label) == (category.cat, category.bar)

    if use_label:
        rest = [f"{name}={value}" for name, value in category.items() if name not in (CAT, BAR)]
        return f"{label}[{', '.join(rest)}]"

    return f"[{', '.join(f'{name}={value}' for name, value in category.items())}]"


def read_category(text, pos=0, source=None, line=None):
    """
    Reads one category from text starting at pos.
    :param text:
    :param pos: Offset to start reading from. Leading whitespace is skipped.
    :param source: Name of the input, used in errors.
    :param line: Line number of text within the input, used in errors.
    :return: (category, offset just after the category)
    """
    def fail(message, at):
        raise FormatError(message, source=source, line=line, column=at + 1)

    while pos < len(text) and text[pos].isspace():
        pos += 1

    features = {}
    match = _LABEL_PATTERN.match(text, pos)
    if match is not None:
        cat, bar = label_features(match.group())
        features = {CAT: cat, BAR: bar}
        pos = match.end()
        if pos >= len(text) or text[pos] != '[':
            return Category(features), pos
    elif pos >= len(text) or text[pos] != '[':
        fail("expected a category", pos)

    # Bracketed feature list
    label_features_given = dict(features)
    pos += 1
    first = True
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            fail("unterminated category, missing ']'", pos)
        if text[pos] == ']':
            pos += 1
            break
        if not first:
            if text[pos] != ',':
                fail("expected ',' or ']'", pos)
            pos += 1
            while pos < len(text) and text[pos].isspace():
                pos += 1

        name_match = _SYMBOL_PATTERN.match(text, pos)
        if name_match is None:
            fail("expected a feature name", pos)
        name = name_match.group()
        pos = name_match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text) or text[pos] != '=':
            fail(f"expected '=' after feature {name}", pos)
        pos += 1
        while pos < len(text) and text[pos].isspace():
            pos += 1
        value_match = _SYMBOL_PATTERN.match(text, pos)
        if value_match is None:
            fail(f"expected a value for feature {name}", pos)
        value = value_match.group()

        if name == BAR and value not in BAR_LEVELS:
            fail(f"invalid bar level {value}", value_match.start())
        if name in features and name not in label_features_given:
            fail(f"feature {name} appears twice", name_match.start())
        if name in label_features_given and label_features_given[name] != value:
            fail(f"feature {name}={value} conflicts with the label", name_match.start())

        features[name] = value
        label_features_given.pop(name, None)
        pos = value_match.end()
        first = False

    return Category(features), pos


def parse_category(text, source=None):
    """
    Parses a whole string as one category.
    """
    category, end = read_category(text, 0, source=source)
    rest = text[end:]
    if rest.strip():
        raise FormatError(f"unexpected text after category: {rest.strip()!r}", source=source,
                          column=end + 1 + (len(rest) - len(rest.lstrip())))
    return category
