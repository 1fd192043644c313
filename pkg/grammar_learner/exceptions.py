class GrammarLearnerError(Exception):
    """
    Base class for all errors raised by the grammar learner.
    """


class FormatError(GrammarLearnerError, ValueError):
    """
    Malformed input text. Carries where the problem was found so that the message can point at it.
    """

    def __init__(self, message, source=None, line=None, column=None, offset=None):
        """
        :param message: What was wrong.
        :param source: File name or other description of the input.
        :param line: 1 based line number, if known.
        :param column: 1 based column number, if known.
        :param offset: 0 based character offset for single line inputs.
        """
        super().__init__(message)
        self.message = message
        self.source = source
        self.line = line
        self.column = column
        self.offset = offset

    def __str__(self):
        location = [str(part) for part in (self.source, self.line, self.column) if part is not None]
        if self.offset is not None and self.column is None:
            location.append(f"offset {self.offset}")

        if location:
            return f"{':'.join(location)}: {self.message}"
        return self.message


class UnknownTagError(GrammarLearnerError, KeyError):
    """
    A token carries a tag that the lexicon or tagset does not define.
    """

    def __init__(self, tag, position, source=None):
        super().__init__(tag)
        self.tag = tag
        self.position = position
        self.source = source

    def __str__(self):
        prefix = f"{self.source}: " if self.source is not None else ""
        return f"{prefix}unknown tag '{self.tag}' at token {self.position}"


class UnparseableSentenceError(GrammarLearnerError):
    """
    A sentence that must be parseable could not be parsed.
    """

    def __init__(self, sentence_id, reason=None):
        self.sentence_id = sentence_id
        self.reason = reason
        message = f"sentence {sentence_id} has no parse"
        if reason is not None:
            message += f" ({reason})"
        super().__init__(message)


class SplitError(GrammarLearnerError, ValueError):
    """
    A corpus split that cannot be made or that breaks disjointness.
    """
