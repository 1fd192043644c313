from functools import total_ordering


@total_ordering
class Status:
    """
    A named outcome: a parser halt reason, a semantic verdict or a learning verdict. A status equals its int value and
    its text, so outcome log columns can be checked against either. Two statuses are equal only if both value and text
    match, so statuses from different families never compare equal.
    """

    __slots__ = ('val', 'text', 'long_text')

    def __init__(self, val, text, long_text=None):
        """
        :param val: Integer value, used for ordering within a family.
        :param text: Short text, used in logs and reports.
        :param long_text: Description.
        """
        self.val = val
        self.text = text
        self.long_text = long_text

    def __eq__(self, other):
        if isinstance(other, Status):
            return (self.val, self.text) == (other.val, other.text)
        if isinstance(other, bool):
            return False
        if isinstance(other, int):
            return self.val == other
        if isinstance(other, str):
            return self.text == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, Status):
            return self.val < other.val
        if isinstance(other, int) and not isinstance(other, bool):
            return self.val < other
        return NotImplemented

    def __hash__(self):
        return hash(self.val)

    def __str__(self):
        return self.text

    def __repr__(self):
        return f"Status({self.val}, {self.text!r})"
