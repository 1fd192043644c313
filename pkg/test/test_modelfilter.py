import os
import unittest
from collections import Counter

import definitions
import grammar_learner.modelfilter as modelfilter
from grammar_learner.exceptions import FormatError
from grammar_learner.featcat import EMPTY, Category
from grammar_learner.grammar import ORIGIN_LEARNT, Rule
from grammar_learner.modelfilter import (SEMANTICS_ABSTAIN, SEMANTICS_OK, SEMANTICS_REJECT, FeatureCondition,
                                         LPRule, ModelConfig)
from grammar_learner.semtypes import E, T, FunctionType, parse_type

S = Category(cat='S', bar='2')
NP = Category(cat='N', bar='2')
VP = Category(cat='V', bar='2')
PP = Category(cat='P', bar='2')
V = Category(cat='V', bar='0', subcat='v')
N1 = Category(cat='N', bar='1')
AP = Category(cat='A', bar='2')

ET = FunctionType(E, T)
SEMTYPES = {'S': T, 'NP': E, 'VP': ET, 'N1': ET, 'AP': FunctionType(ET, ET), 'PP': FunctionType(ET, ET)}


class TestLP(unittest.TestCase):
    lp_rules = [LPRule(FeatureCondition.parse('[subcat]'), FeatureCondition.parse('~[subcat]')),
                LPRule(FeatureCondition.parse('cat=N'), FeatureCondition.parse('cat=P'))]

    def test_conditions(self):
        self.assertTrue(FeatureCondition.parse('[subcat]').matches(V))
        self.assertFalse(FeatureCondition.parse('[subcat]').matches(NP))
        self.assertTrue(FeatureCondition.parse('~ [subcat]').matches(NP))
        self.assertTrue(FeatureCondition.parse('cat = N').matches(NP))
        self.assertEqual(str(FeatureCondition.parse(' ~[subcat] ')), '~[subcat]')
        self.assertRaises(ValueError, FeatureCondition.parse, 'subcat')

    def test_check_lp(self):
        self.assertIsNone(modelfilter.check_lp(VP, (V, NP), self.lp_rules))

        violation = modelfilter.check_lp(VP, (NP, V), self.lp_rules)
        self.assertEqual(violation.rule, self.lp_rules[0])
        self.assertEqual(violation.positions, (0, 1))

        violation = modelfilter.check_lp(NP, (PP, NP), self.lp_rules)
        self.assertEqual(violation.rule, self.lp_rules[1])

        # The mother is not ordered
        self.assertIsNone(modelfilter.check_lp(V, (NP,), self.lp_rules))


class TestSemantics(unittest.TestCase):
    def test_compose(self):
        """
        S -> NP VP is accepted with the VP as functor. VP -> VP VP is rejected.
        :return:
        """
        verdict = modelfilter.check_semantics(Rule(S, (NP, VP)), SEMTYPES)
        self.assertEqual(verdict.status, SEMANTICS_OK)
        self.assertEqual(verdict.functor_index, 1)

        self.assertEqual(modelfilter.check_semantics(Rule(VP, (VP, VP)), SEMTYPES).status, SEMANTICS_REJECT)

        verdict = modelfilter.check_semantics(Rule(VP, (VP, PP)), SEMTYPES)
        self.assertEqual((verdict.status, verdict.functor_index), (SEMANTICS_OK, 1))

    def test_quantified_types(self):
        """
        With quantified noun phrases S -> NP VP composes with the VP as functor and VP -> VP VP does not compose.
        :return:
        """
        quantified = {'S': T, 'NP': parse_type('<<e,t>,t>'), 'VP': parse_type('<<<e,t>,t>,t>')}
        verdict = modelfilter.check_semantics(Rule(S, (NP, VP)), quantified)
        self.assertEqual((verdict.status, verdict.functor_index), (SEMANTICS_OK, 1))
        self.assertEqual(modelfilter.check_semantics(Rule(VP, (VP, VP)), quantified).status, SEMANTICS_REJECT)

        model = ModelConfig(semtypes=quantified)
        self.assertEqual(modelfilter.filter_instantiations([Rule(VP, (VP, VP), origin=ORIGIN_LEARNT)], model), [])

    def test_functor_either_side(self):
        semtypes = {'A': FunctionType(E, E), 'B': FunctionType(E, E), 'C': E}
        a = Category(cat='A', bar='0')
        b = Category(cat='B', bar='0')
        rule = Rule(Category(cat='C', bar='0'), (a, b))
        self.assertEqual(modelfilter.check_semantics(rule, semtypes).status, SEMANTICS_REJECT)

        semtypes['B'] = FunctionType(FunctionType(E, E), FunctionType(E, E))
        semtypes['A'] = FunctionType(E, E)
        self.assertEqual(modelfilter.check_semantics(rule, semtypes).functor_index, 1)
        self.assertEqual(modelfilter.check_semantics(rule, semtypes, head_index=0).functor_index, 1)

    def test_abstain(self):
        self.assertEqual(modelfilter.check_semantics(Rule(VP, (V, NP)), SEMTYPES).status, SEMANTICS_ABSTAIN)
        self.assertEqual(modelfilter.check_semantics(Rule(EMPTY, (NP,)), SEMTYPES).status, SEMANTICS_ABSTAIN)

    def test_unary(self):
        self.assertEqual(modelfilter.check_semantics(Rule(NP, (NP,)), SEMTYPES).status, SEMANTICS_OK)
        self.assertEqual(modelfilter.check_semantics(Rule(NP, (N1,)), SEMTYPES).status, SEMANTICS_REJECT)


class TestHfc(unittest.TestCase):
    def test_apply_hfc(self):
        head = V.with_features(num='sg', vform='fin', per='3')
        rule = modelfilter.apply_hfc(Rule(VP, (head, PP)), 0, {'num', 'vform'})
        self.assertEqual(rule.lhs, VP.with_features(num='sg', vform='fin'))

        self.assertIsNone(modelfilter.apply_hfc(Rule(VP.with_features(num='pl'), (head, PP)), 0, {'num'}))

        unchanged = Rule(VP, (V, PP))
        self.assertIs(modelfilter.apply_hfc(unchanged, 0, {'num'}), unchanged)


class TestXbar(unittest.TestCase):
    def test_projection_bars(self):
        self.assertEqual(modelfilter.projection_bars('V', '0'), ('1', '2'))
        self.assertEqual(modelfilter.projection_bars('N', '1'), ('1', '2'))
        self.assertEqual(modelfilter.projection_bars('V', '2'), ('2',))
        self.assertEqual(modelfilter.projection_bars('Det', '0', {('Det', '0'): ()}), ())

    def test_project(self):
        """
        Each daughter with a major category is tried as the head.
        :return:
        """
        refined = modelfilter.project_xbar(Rule(EMPTY, (V, NP)))
        self.assertEqual([(rule.lhs, rule.head_index) for rule in refined],
                         [(Category(cat='V', bar='1'), 0), (VP, 0), (NP, 1)])

        refined = modelfilter.project_xbar(Rule(VP, (V, NP)))
        self.assertEqual([(rule.lhs, rule.head_index) for rule in refined], [(VP, 0)])

        self.assertEqual(modelfilter.project_xbar(Rule(VP, (V, NP)), {('V', '0'): ()}), [])
        self.assertEqual(modelfilter.project_xbar(Rule(EMPTY, (EMPTY, EMPTY))), [])

        # A named head is kept
        refined = modelfilter.project_xbar(Rule(EMPTY, (V, NP), head_index=1))
        self.assertEqual([(rule.lhs, rule.head_index) for rule in refined], [(NP, 1)])

    def test_project_adjunction(self):
        """
        A bar 1 head projects to bar 1 as well as bar 2, unless the projection table allows bar 2 only.
        :return:
        """
        det = Category(cat='Det', bar='0')
        refined = modelfilter.project_xbar(Rule(EMPTY, (det, N1), head_index=1))
        self.assertEqual([rule.lhs for rule in refined], [N1, NP])
        refined = modelfilter.project_xbar(Rule(EMPTY, (det, N1), head_index=1), {('N', '1'): ('2',)})
        self.assertEqual([rule.lhs for rule in refined], [NP])

        # Det is not a possible head
        refined = modelfilter.project_xbar(Rule(EMPTY, (det, N1)), {('Det', '0'): ()})
        self.assertEqual([(rule.lhs, rule.head_index) for rule in refined], [(N1, 1), (NP, 1)])


class TestFilter(unittest.TestCase):
    model = ModelConfig(features={'cat', 'bar', 'subcat', 'num'},
                        lp_rules=[LPRule(FeatureCondition.parse('[subcat]'), FeatureCondition.parse('~[subcat]'))],
                        semtypes=SEMTYPES, hfc_features={'num'})

    def test_filter(self):
        tally = Counter()
        survivors = modelfilter.filter_instantiations([Rule(VP, (VP, PP), origin=ORIGIN_LEARNT)], self.model, tally)
        self.assertEqual(len(survivors), 1)
        self.assertEqual(survivors[0].head_index, 0)
        self.assertEqual(survivors[0].sem_functor_index, 1)
        self.assertEqual(survivors[0].origin, ORIGIN_LEARNT)
        self.assertEqual(sum(tally.values()), 0)

    def test_rejections(self):
        """
        Each stage counts its rejections.
        :return:
        """
        tally = Counter()
        candidates = [Rule(EMPTY, (EMPTY, EMPTY)),
                      Rule(VP.with_features(num='pl'), (V.with_features(num='sg'), NP)),
                      Rule(VP, (NP, V)),
                      Rule(VP, (VP, VP))]
        self.assertEqual(modelfilter.filter_instantiations(candidates, self.model, tally), [])
        # VP -> VP VP has two possible heads, each rejected
        self.assertEqual(tally, Counter({'xbar': 1, 'hfc': 1, 'lp': 1, 'semantics': 2}))

    def test_switches(self):
        """
        With the model off only X-bar projection applies.
        :return:
        """
        survivors = modelfilter.filter_instantiations([Rule(VP, (NP, V)), Rule(VP, (VP, VP))],
                                                      self.model.xbar_only())
        self.assertEqual([rule.head_index for rule in survivors], [1, 0, 1])
        self.assertIsNone(survivors[1].sem_functor_index)

    def test_idempotent(self):
        candidates = [Rule(EMPTY, (V.with_features(num='sg'), NP)), Rule(S, (NP, VP)), Rule(VP, (VP, PP))]
        once = modelfilter.filter_instantiations(candidates, self.model)
        twice = modelfilter.filter_instantiations(once, self.model)
        self.assertEqual([(rule, rule.head_index, rule.sem_functor_index) for rule in once],
                         [(rule, rule.head_index, rule.sem_functor_index) for rule in twice])
        self.assertEqual([rule.lhs for rule in once], [rule.lhs for rule in twice])

    def test_with_semtypes(self):
        model = self.model.with_semtypes({'NP': T, 'Det': E})
        self.assertEqual(model.semtypes['NP'], E)
        self.assertEqual(model.semtypes['Det'], E)


class TestLoadModel(unittest.TestCase):
    def test_load(self):
        model = modelfilter.load_model('# model\nfeatures: cat, bar, subcat\nlp: [subcat] < ~[subcat]\n'
                                       'semtype VP = <e,t>\nhfc: subcat\nxbar: Det 0 ->\nxbar: V 0 -> 2\n')
        self.assertEqual(model.features, frozenset({'cat', 'bar', 'subcat'}))
        self.assertEqual(str(model.lp_rules[0]), '[subcat] < ~[subcat]')
        self.assertEqual(model.semtypes['VP'], ET)
        self.assertEqual(model.hfc_features, frozenset({'subcat'}))
        self.assertEqual(model.xbar[('Det', '0')], ())
        self.assertEqual(model.xbar[('V', '0')], ('2',))

    def test_errors(self):
        for text in ['features: cat\nlp: [num] < ~[num]\n', 'features: cat\nhfc: num\n', 'xbar: N 5 -> 2\n',
                     'xbar: N 0 -> 3\n', 'semtype NP = <e>\n', 'semtype NP\n', 'colour: red\n', 'nonsense\n',
                     'lp: [subcat]\n', 'lp: subcat < [num]\n']:
            self.assertRaises(FormatError, modelfilter.load_model, text)

        with self.assertRaises(FormatError) as context:
            modelfilter.load_model('\nsemtype NP = <e,t\n', source='bad.cfg')
        self.assertEqual(context.exception.line, 2)
        self.assertEqual(context.exception.source, 'bad.cfg')

    def test_bundled(self):
        model = modelfilter.read_model_file(os.path.join(definitions.DATA_DIR, 'model.cfg'))
        self.assertEqual(model.semtypes['S'], T)
        self.assertEqual(model.semtypes['VP'], parse_type('<e,t>'))
        self.assertEqual(model.xbar[('Det', '0')], ())
        self.assertEqual(len(model.lp_rules), 4)
        self.assertEqual(model.hfc_features, frozenset({'num', 'per', 'vform'}))


if __name__ == '__main__':
    unittest.main()
