"""
Extensional semantic types and the function application check.
"""
from dataclasses import dataclass
from typing import Union

from grammar_learner.exceptions import FormatError


@dataclass(frozen=True)
class BaseType:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class FunctionType:
    """
    The type of a function from arg to result, written <arg,result>.
    """
    arg: 'SemType'
    result: 'SemType'

    def __str__(self):
        return f"<{self.arg},{self.result}>"


SemType = Union[BaseType, FunctionType]

# Entities and truth values
E = BaseType('e')
T = BaseType('t')

BASE_TYPES = {'e': E, 't': T}


def compose(functor, argument):
    """
    Applies functor to argument.
    :param functor:
    :param argument:
    :return: The result type if functor is <argument,b>, otherwise None.
    """
    if isinstance(functor, FunctionType) and functor.arg == argument:
        return functor.result
    return None


def parse_type(text):
    """
    Parses a type written as e, t or <T,T>. No whitespace is allowed.
    :param text:
    :return: The SemType.
    :raises FormatError: with the offset of the first bad character.
    """
    semtype, end = _read_type(text, 0)
    if end != len(text):
        raise FormatError(f"unexpected {text[end]!r} after type", offset=end)
    return semtype


def _read_type(text, pos):
    if pos >= len(text):
        raise FormatError("unexpected end of type", offset=pos)

    char = text[pos]
    if char in BASE_TYPES:
        return BASE_TYPES[char], pos + 1

    if char != '<':
        raise FormatError(f"expected 'e', 't' or '<', found {char!r}", offset=pos)

    arg, pos = _read_type(text, pos + 1)
    if pos >= len(text) or text[pos] != ',':
        raise FormatError("expected ','", offset=pos)
    result, pos = _read_type(text, pos + 1)
    if pos >= len(text) or text[pos] != '>':
        raise FormatError("expected '>'", offset=pos)

    return FunctionType(arg, result), pos + 1
