import unittest

from hypothesis import given, settings, strategies as st

import grammar_learner.featcat as featcat
from grammar_learner.exceptions import FormatError
from grammar_learner.featcat import EMPTY, Category

# Small feature space so that generated pairs often share features and often conflict
categories = st.fixed_dictionaries({}, optional={
    'cat': st.sampled_from(['N', 'V', 'A', 'P', 'S']),
    'bar': st.sampled_from(['0', '1', '2']),
    'num': st.sampled_from(['sg', 'pl']),
    'per': st.sampled_from(['1', '3']),
    'vform': st.sampled_from(['fin', 'base'])}).map(Category)


class TestCategory(unittest.TestCase):
    def test_canonical(self):
        """
        Feature order does not matter. Integer values are atomic strings.
        :return:
        """
        self.assertEqual(Category(num='sg', cat='N'), Category(cat='N', num='sg'))
        self.assertEqual(Category(per=3), Category(per='3'))
        self.assertEqual(Category(cat='N', num='sg').key, (('cat', 'N'), ('num', 'sg')))
        self.assertEqual(len(EMPTY), 0)
        self.assertTrue(EMPTY)

    def test_invalid(self):
        self.assertRaises(ValueError, Category, bar='4')
        self.assertRaises(TypeError, Category, num=['sg'])
        self.assertRaises(TypeError, Category, num='')

    def test_subsumes(self):
        self.assertTrue(Category(cat='N').subsumes(Category(cat='N', bar='2')))
        self.assertFalse(Category(cat='N', bar='2').subsumes(Category(cat='N')))
        self.assertTrue(EMPTY.subsumes(Category(cat='V')))


class TestUnify(unittest.TestCase):
    def test_unify(self):
        self.assertEqual(featcat.unify(Category(cat='N'), Category(num='sg')), Category(cat='N', num='sg'))
        self.assertEqual(featcat.unify(Category(cat='N', num='sg'), Category(cat='N', num='sg')),
                         Category(cat='N', num='sg'))
        self.assertIsNone(featcat.unify(Category(cat='N', num='sg'), Category(num='pl')))
        self.assertEqual(featcat.unify(EMPTY, Category(cat='V')), Category(cat='V'))

    @settings(max_examples=10000, deadline=None)
    @given(categories, categories, categories)
    def test_algebra(self, a, b, c):
        """
        Commutativity, idempotence, identity, associativity and that a result is subsumed by both inputs.
        :return:
        """
        ab = featcat.unify(a, b)
        self.assertEqual(ab, featcat.unify(b, a))
        self.assertEqual(featcat.unify(a, a), a)
        self.assertEqual(featcat.unify(a, EMPTY), a)
        self.assertEqual(featcat.unify(EMPTY, a), a)

        if ab is None:
            self.assertTrue(any(name in b and b.get(name) != value for name, value in a.items()))
        else:
            self.assertTrue(a.subsumes(ab))
            self.assertTrue(b.subsumes(ab))
            self.assertEqual(len(ab), len(set(a.names()) | set(b.names())))

        left = featcat.unify(ab, c) if ab is not None else None
        bc = featcat.unify(b, c)
        right = featcat.unify(a, bc) if bc is not None else None
        self.assertEqual(left, right)


class TestLabels(unittest.TestCase):
    def test_label_of(self):
        self.assertEqual(featcat.label_of(Category(cat='N', bar='2')), 'NP')
        self.assertEqual(featcat.label_of(Category(cat='N', bar='1', num='sg')), 'N1')
        self.assertEqual(featcat.label_of(Category(cat='N', bar='0')), 'N')
        self.assertEqual(featcat.label_of(Category(cat='S', bar='2')), 'S')
        self.assertEqual(featcat.label_of(Category(cat='Det')), 'Det')
        self.assertEqual(featcat.label_of(Category(num='sg')), featcat.UNKNOWN_LABEL)

    def test_label_features(self):
        self.assertEqual(featcat.label_features('NP'), ('N', '2'))
        self.assertEqual(featcat.label_features('N1'), ('N', '1'))
        self.assertEqual(featcat.label_features('S'), ('S', '2'))
        self.assertEqual(featcat.label_features('AdvP'), ('Adv', '2'))
        self.assertEqual(featcat.label_features('P'), ('P', '0'))
        self.assertEqual(featcat.category_of_label('NP', num='sg'), Category(cat='N', bar='2', num='sg'))


class TestFormat(unittest.TestCase):
    def test_format(self):
        self.assertEqual(featcat.format_category(Category(cat='N', bar='2', num='sg', per='3')), 'NP[num=sg, per=3]')
        self.assertEqual(featcat.format_category(Category(cat='S', bar='2')), 'S[]')
        self.assertEqual(featcat.format_category(Category(per='3')), '[per=3]')
        self.assertEqual(featcat.format_category(Category(cat='N')), '[cat=N]')
        self.assertEqual(featcat.format_category(Category(cat='S', bar='0')), '[bar=0, cat=S]')
        self.assertEqual(featcat.format_category(EMPTY), '[]')

    def test_parse(self):
        self.assertEqual(featcat.parse_category('NP'), Category(cat='N', bar='2'))
        self.assertEqual(featcat.parse_category('V[subcat=v, vform=fin]'),
                         Category(cat='V', bar='0', subcat='v', vform='fin'))
        self.assertEqual(featcat.parse_category(' [ num = sg ] '), Category(num='sg'))
        self.assertEqual(featcat.parse_category('[]'), EMPTY)
        self.assertEqual(featcat.parse_category('NP[bar=2]'), Category(cat='N', bar='2'))

    @given(categories)
    def test_reads_back(self, category):
        self.assertEqual(featcat.parse_category(featcat.format_category(category)), category)

    def test_errors(self):
        """
        Errors point at the offending character with a 1 based column.
        :return:
        """
        with self.assertRaises(FormatError) as context:
            featcat.parse_category('NP[bar=3]')
        self.assertEqual(context.exception.column, 8)

        with self.assertRaises(FormatError) as context:
            featcat.parse_category('[num=sg, num=pl]')
        self.assertEqual(context.exception.column, 10)
        self.assertIn('twice', context.exception.message)

        with self.assertRaises(FormatError) as context:
            featcat.parse_category('NP[cat=V]')
        self.assertIn('conflicts', context.exception.message)

        self.assertRaises(FormatError, featcat.parse_category, 'NP[num=sg')
        self.assertRaises(FormatError, featcat.parse_category, 'NP VP')
        self.assertRaises(FormatError, featcat.parse_category, '')
        self.assertRaises(ValueError, featcat.parse_category, '[num sg]')


if __name__ == '__main__':
    unittest.main()
