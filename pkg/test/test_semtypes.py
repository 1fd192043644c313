import unittest

from hypothesis import given, settings, strategies as st

import grammar_learner.semtypes as semtypes
from grammar_learner.exceptions import FormatError
from grammar_learner.semtypes import E, T, FunctionType

# Quantified noun phrases and verb phrases taking them as arguments
GENERALIZED_QUANTIFIER = FunctionType(FunctionType(E, T), T)
QUANTIFIED_PREDICATE = FunctionType(GENERALIZED_QUANTIFIER, T)

types = st.recursive(st.sampled_from([E, T]), lambda children: st.builds(FunctionType, children, children),
                     max_leaves=16)


class TestSemTypes(unittest.TestCase):
    def test_parse(self):
        self.assertEqual(semtypes.parse_type('e'), E)
        self.assertEqual(semtypes.parse_type('<e,t>'), FunctionType(E, T))
        self.assertEqual(semtypes.parse_type('<<e,t>,t>'), FunctionType(FunctionType(E, T), T))
        self.assertEqual(str(semtypes.parse_type('<<e,t>,<e,t>>')), '<<e,t>,<e,t>>')

    @given(types)
    @settings(max_examples=1000, deadline=None)
    def test_round_trip(self, semtype):
        text = str(semtype)
        self.assertEqual(semtypes.parse_type(text), semtype)
        self.assertEqual(str(semtypes.parse_type(text)), text)

    def test_parse_errors(self):
        """
        The offset of the first bad character is reported.
        :return:
        """
        for text, offset in [('<e, t>', 3), ('<e,t', 4), ('et', 1), ('', 0), ('x', 0), ('<e;t>', 2)]:
            with self.assertRaises(FormatError) as context:
                semtypes.parse_type(text)
            self.assertEqual(context.exception.offset, offset, text)

    def test_compose(self):
        et = FunctionType(E, T)
        self.assertEqual(semtypes.compose(et, E), T)
        self.assertIsNone(semtypes.compose(et, T))
        self.assertIsNone(semtypes.compose(E, E))
        self.assertIsNone(semtypes.compose(E, et))

        # A modifier of <e,t> gives back <e,t>
        modifier = FunctionType(et, et)
        self.assertEqual(semtypes.compose(modifier, et), et)
        self.assertIsNone(semtypes.compose(et, et))

    def test_compose_quantified(self):
        """
        A verb phrase applied to a quantified noun phrase gives a truth value. Neither verb phrase applies to the other.
        :return:
        """
        self.assertEqual(semtypes.parse_type('<<<e,t>,t>,t>'), QUANTIFIED_PREDICATE)
        self.assertEqual(semtypes.compose(QUANTIFIED_PREDICATE, GENERALIZED_QUANTIFIER), T)
        self.assertIsNone(semtypes.compose(GENERALIZED_QUANTIFIER, QUANTIFIED_PREDICATE))
        self.assertIsNone(semtypes.compose(QUANTIFIED_PREDICATE, QUANTIFIED_PREDICATE))


if __name__ == '__main__':
    unittest.main()
