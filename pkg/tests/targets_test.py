# coding=utf-8

import math
import unittest

import numpy

from adaptpriv import excs
from adaptpriv import ba_distortion
from adaptpriv import curves
from adaptpriv import probability
from adaptpriv import targets
from adaptpriv.types.releases import Budget
from adaptpriv.types.releases import EnumSolvePath
from adaptpriv.types.solver import BaOptions
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import LagrangePair
from adaptpriv.types.solver import MiOptions

from tests import fixtures


class BudgetTest(unittest.TestCase):

    def test_order_violation(self):
        with self.assertRaises(excs.BudgetOrderViolation):
            Budget(eps=0.5, delta=0.3)

    def test_order_violation_is_infeasible_budget(self):
        self.assertTrue(
            issubclass(excs.BudgetOrderViolation, excs.InfeasibleBudget),
        )

    def test_negative_or_nan(self):
        with self.assertRaises(excs.InfeasibleBudget):
            Budget(eps=-0.1, delta=0.3)

        with self.assertRaises(excs.InfeasibleBudget):
            Budget(eps=0.1, delta=math.nan)

    def test_admits(self):
        budget = Budget(eps=0.1, delta=0.2)

        self.assertTrue(budget.admits(eps_leak=0.1, delta_leak=0.2, tol=0.0))
        self.assertFalse(budget.admits(eps_leak=0.1, delta_leak=0.21, tol=0.0))


class EffectiveBudgetTest(unittest.TestCase):

    def setUp(self):
        self.j = fixtures.reference_joint()

    def test_raised_to_past_leakage(self):
        budget = targets.effective_budget(j=self.j, budget=Budget(0.0, 0.0))

        self.assertEqual(budget.eps, 0.0)
        self.assertAlmostEqual(
            budget.delta, probability.information_zx(j=self.j),
        )

    def test_unchanged_above_floor(self):
        budget = Budget(eps=0.1, delta=0.2)

        self.assertIs(targets.effective_budget(j=self.j, budget=budget), budget)


class SolveForBudgetTest(unittest.TestCase):

    def setUp(self):
        self.j = fixtures.reference_joint()
        self.d = fixtures.hamming2()

    def _solve(self, eps, delta):
        return targets.solve_for_budget(
            j=self.j,
            problem=EnumProblem.DISTORTION,
            budget=Budget(eps=eps, delta=delta),
            d=self.d,
        )

    def test_inactive_budget(self):
        report = self._solve(eps=10.0, delta=10.0)

        self.assertAlmostEqual(
            report.achieved.utility, fixtures.DISTORTION_FREE, places=3,
        )
        self.assertEqual(report.mu, LagrangePair(mu1=0.0, mu2=0.0))
        self.assertIs(report.path, EnumSolvePath.BISECTION)
        self.assertTrue(report.feasible)

    def test_zero_budget_releases_a_constant(self):
        report = self._solve(eps=0.0, delta=0.0)

        self.assertAlmostEqual(
            report.achieved.utility, fixtures.DISTORTION_CONSTANT, places=3,
        )
        self.assertLessEqual(report.achieved.eps_leak, 1e-6)
        self.assertTrue(report.feasible)

    def test_report_keeps_the_requested_budget(self):
        with self.assertLogs("adaptpriv.targets", level="WARNING") as logs:
            report = self._solve(eps=0.0, delta=0.0)

        self.assertEqual(report.budget, Budget(eps=0.0, delta=0.0))
        self.assertEqual(report.budget_effective.eps, 0.0)
        self.assertAlmostEqual(
            report.budget_effective.delta,
            probability.information_zx(j=self.j),
        )
        self.assertTrue(any("raised" in line for line in logs.output))

    def test_unraised_budget_is_its_own_effective_budget(self):
        report = self._solve(eps=0.2, delta=0.3)

        self.assertEqual(report.budget, Budget(eps=0.2, delta=0.3))
        self.assertEqual(report.budget_effective, report.budget)

    def test_active_budgets_are_met(self):
        for eps, delta in [(0.05, 0.1), (0.2, 0.3)]:
            report = self._solve(eps=eps, delta=delta)

            self.assertTrue(report.feasible)
            self.assertLessEqual(report.achieved.eps_leak, eps + 1e-6)
            self.assertLessEqual(report.achieved.delta_leak, delta + 1e-6)
            self.assertGreater(
                report.achieved.utility, fixtures.DISTORTION_FREE,
            )
            self.assertLess(
                report.achieved.utility, fixtures.DISTORTION_CONSTANT,
            )
            self.assertFalse(report.local)

    def test_dual_bound_below_utility(self):
        report = self._solve(eps=0.05, delta=0.1)

        self.assertIsNotNone(report.dual_bound)
        self.assertLessEqual(
            report.dual_bound, report.achieved.utility + 1e-4,
        )
        self.assertIn(LagrangePair(mu1=0.0, mu2=0.0), report.examined)

    def test_tighter_budget_costs_utility(self):
        loose = self._solve(eps=0.2, delta=0.3)
        tight = self._solve(eps=0.05, delta=0.1)

        self.assertLessEqual(
            loose.achieved.utility, tight.achieved.utility + 1e-6,
        )

    def test_distortion_problem_needs_matrix(self):
        with self.assertRaises(excs.InvalidInput):
            targets.solve_for_budget(
                j=self.j,
                problem=EnumProblem.DISTORTION,
                budget=Budget(eps=0.1, delta=0.2),
            )


class SolveWithoutLeakageTest(unittest.TestCase):

    def test_best_constant_release(self):
        j = fixtures.reference_joint()

        report = targets.solve_without_leakage(
            j=j,
            problem=EnumProblem.DISTORTION,
            budget=Budget(eps=0.0, delta=0.0),
            d=fixtures.hamming2(),
        )

        self.assertIs(report.path, EnumSolvePath.CONSTANT)
        self.assertIsNone(report.mu)
        self.assertTrue(report.feasible)
        self.assertAlmostEqual(
            report.achieved.utility, fixtures.DISTORTION_CONSTANT, places=3,
        )
        self.assertAlmostEqual(report.achieved.eps_leak, 0.0, places=12)
        self.assertAlmostEqual(
            report.achieved.delta_leak,
            probability.information_zx(j=j),
            places=12,
        )
        probs = report.channel.probs
        self.assertTrue(numpy.all(probs == probs[:, :1, :1]))

    def test_information_problem(self):
        report = targets.solve_without_leakage(
            j=fixtures.reference_joint(),
            problem=EnumProblem.MUTUAL_INFO,
            budget=Budget(eps=0.0, delta=0.0),
        )

        self.assertIs(report.path, EnumSolvePath.CONSTANT)
        self.assertAlmostEqual(report.achieved.utility, 0.0, places=12)


class BruteForceTest(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.channels = fixtures.binary_channel_grid(step=0.05)

    def test_no_grid_channel_beats_the_solver(self):
        rng = numpy.random.default_rng(31)

        for index in range(50):
            j = fixtures.random_joint(rng=rng, n_r=2, n_z=2, n_x=2)
            d = fixtures.random_distortion(rng=rng, n_rhat=2, n_r=2)
            eps = float(rng.uniform(0.02, 0.3))
            budget = targets.effective_budget(
                j=j,
                budget=Budget(eps=eps, delta=eps + float(rng.uniform(0, 0.3))),
            )

            report = targets.solve_for_budget(
                j=j, problem=EnumProblem.DISTORTION, budget=budget, d=d,
            )
            oracle = fixtures.brute_force_budget(
                j=j,
                d=d,
                eps=budget.eps,
                delta=budget.delta,
                channels=self.channels,
            )

            with self.subTest(instance=index):
                self.assertTrue(report.feasible)
                self.assertLessEqual(report.achieved.utility, oracle + 1e-3)


class TimeShareToTargetTest(unittest.TestCase):

    def setUp(self):
        self.j = fixtures.reference_joint()
        self.d = fixtures.hamming2()
        self.budget = Budget(eps=0.1, delta=0.2)

        search = targets.BudgetSearch(
            j=self.j,
            problem=EnumProblem.DISTORTION,
            budget=self.budget,
            d=self.d,
        )
        self.point_constant = search.constant_point()
        self.point_free = curves.point_from_result(
            mu=LagrangePair(mu1=0.0, mu2=0.0),
            result=ba_distortion.ba_distortion_run(
                j=self.j, d=self.d, mu=LagrangePair(mu1=0.0, mu2=0.0),
            ),
        )

    def test_mixes_up_to_the_budget(self):
        report = targets.timeshare_to_target(
            points=[self.point_constant, self.point_free],
            budget=self.budget,
            j=self.j,
            problem=EnumProblem.DISTORTION,
            d=self.d,
        )

        self.assertIs(report.path, EnumSolvePath.TIMESHARE)
        self.assertIsNone(report.mu)
        self.assertTrue(report.feasible)
        self.assertAlmostEqual(sum(report.coefficients), 1.0)
        self.assertGreater(report.coefficients[1], 0.0)
        self.assertLess(
            report.achieved.utility, fixtures.DISTORTION_CONSTANT,
        )
        self.assertAlmostEqual(
            max(
                report.achieved.eps_leak - self.budget.eps,
                report.achieved.delta_leak - self.budget.delta,
            ),
            0.0,
            delta=1e-3,
        )

    def test_feasible_point_is_kept(self):
        report = targets.timeshare_to_target(
            points=[self.point_constant, self.point_free],
            budget=Budget(eps=5.0, delta=5.0),
            j=self.j,
            problem=EnumProblem.DISTORTION,
            d=self.d,
        )

        self.assertEqual(report.coefficients, (0.0, 1.0))
        self.assertAlmostEqual(
            report.achieved.utility, fixtures.DISTORTION_FREE, places=3,
        )

    def test_no_feasible_point(self):
        with self.assertRaises(excs.NoBracket):
            targets.timeshare_to_target(
                points=[self.point_free],
                budget=self.budget,
                j=self.j,
                problem=EnumProblem.DISTORTION,
                d=self.d,
            )

    def test_no_points(self):
        with self.assertRaises(excs.TooFewPoints):
            targets.timeshare_to_target(
                points=[],
                budget=self.budget,
                j=self.j,
                problem=EnumProblem.DISTORTION,
                d=self.d,
            )


class SolveAtMultipliersTest(unittest.TestCase):

    def setUp(self):
        self.j = fixtures.reference_joint()
        self.d = fixtures.hamming2()

    def test_without_budget(self):
        mu = LagrangePair(mu1=0.1, mu2=0.1)

        report = targets.solve_at_multipliers(
            j=self.j, problem=EnumProblem.DISTORTION, mu=mu, d=self.d,
        )

        self.assertIs(report.path, EnumSolvePath.FIXED)
        self.assertEqual(report.mu, mu)
        self.assertTrue(report.feasible)
        self.assertIsNone(report.dual_bound)
        self.assertEqual(report.examined, (mu,))

    def test_with_budget(self):
        budget = Budget(eps=0.0, delta=0.01)

        report = targets.solve_at_multipliers(
            j=self.j,
            problem=EnumProblem.DISTORTION,
            mu=LagrangePair(mu1=0.1, mu2=0.1),
            d=self.d,
            budget=budget,
        )

        self.assertFalse(report.feasible)
        self.assertLessEqual(
            report.dual_bound, fixtures.DISTORTION_CONSTANT + 1e-6,
        )

    def test_information_problem_is_local(self):
        report = targets.solve_at_multipliers(
            j=self.j,
            problem=EnumProblem.MUTUAL_INFO,
            mu=LagrangePair(mu1=0.5, mu2=0.5),
            opts=MiOptions(base=BaOptions(max_iters=2000), n_init=3),
        )

        self.assertTrue(report.local)
        self.assertLessEqual(
            report.achieved.eps_leak, report.achieved.delta_leak + 1e-12,
        )


if __name__ == "__main__":
    unittest.main()
