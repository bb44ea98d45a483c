# coding=utf-8

import dataclasses
import unittest

import numpy
import numpy.testing

from adaptpriv import excs
from adaptpriv import probability
from adaptpriv import sessions
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import Pmf
from adaptpriv.types.releases import Budget
from adaptpriv.types.releases import EnumSolvePath
from adaptpriv.types.releases import RequestSpec
from adaptpriv.types.solver import LagrangePair

from tests import fixtures


PX = [0.518, 0.482]

REQUEST = [[0.168, 0.894], [0.832, 0.106]]

IDENTITY = [[1.0, 0.0], [0.0, 1.0]]


def _spec(budget=None, mu=None, request=REQUEST, label="request"):
    return RequestSpec(
        request_channel=request, budget=budget, mu=mu, label=label,
    )


class SessionStateTest(unittest.TestCase):

    def test_new_session(self):
        state = sessions.session_new(px=Pmf(probs=PX), seed=3)

        self.assertEqual(state.n_z, 1)
        self.assertEqual(state.step, 0)
        self.assertEqual(state.delta_floor, 0.0)
        self.assertAlmostEqual(sessions.cumulative_leakage(state=state), 0.0)

    def test_realised_value_out_of_range(self):
        with self.assertRaises(excs.InvalidInput):
            sessions.session_new(px=Pmf(probs=PX), x_true=2)

    def test_step_joint_matches_the_reference_marginal(self):
        state = sessions.session_new(px=Pmf(probs=PX))

        j = sessions.build_step_joint(
            state=state, spec=_spec(mu=LagrangePair(mu1=1.0, mu2=1.0)),
        )

        self.assertEqual(j.shape, (2, 1, 2))
        numpy.testing.assert_allclose(
            j.probs[:, 0, :],
            numpy.array(fixtures.REFERENCE_PROBS).sum(axis=1),
            atol=1e-3,
        )

    def test_request_alphabet_mismatch(self):
        state = sessions.session_new(px=Pmf(probs=PX))
        spec = _spec(
            budget=Budget(eps=0.1, delta=0.1),
            request=[[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]],
        )

        with self.assertRaises(excs.DimensionMismatch):
            sessions.build_step_joint(state=state, spec=spec)

    def test_compose_index_order(self):
        pz_given_x = numpy.array([[0.25, 1.0], [0.75, 0.0]])
        ch = probability.deterministic_channel(
            symbols=numpy.array([[0, 1], [1, 1]]), n_rhat=2,
        )

        composed = sessions.compose_pz_given_x(pz_given_x=pz_given_x, ch=ch)

        # Rows are (z, r_hat) pairs with z most significant.
        numpy.testing.assert_allclose(
            composed, [[0.25, 0.0], [0.0, 1.0], [0.0, 0.0], [0.75, 0.0]],
        )


class RequestSpecTest(unittest.TestCase):

    def test_needs_exactly_one_of_budget_and_mu(self):
        with self.assertRaises(excs.InvalidInput):
            _spec()

        with self.assertRaises(excs.InvalidInput):
            _spec(
                budget=Budget(eps=0.1, delta=0.1),
                mu=LagrangePair(mu1=1.0, mu2=1.0),
            )

    def test_request_channel_normalized(self):
        with self.assertRaises(excs.NotNormalized):
            _spec(mu=LagrangePair(mu1=1.0, mu2=1.0), request=[[0.5, 0.5]])

    def test_default_distortion_is_hamming(self):
        spec = _spec(mu=LagrangePair(mu1=1.0, mu2=1.0))

        numpy.testing.assert_array_equal(spec.distortion.d, [[0, 1], [1, 0]])


class HandleRequestTest(unittest.TestCase):

    def setUp(self):
        self.px = Pmf(probs=PX)

    def test_repeated_request_under_generous_budgets(self):
        spec = _spec(budget=Budget(eps=1.0, delta=1.0))

        records, state = sessions.run_session(
            px=self.px, specs=[spec, spec], seed=1,
        )

        self.assertAlmostEqual(
            records[0].achieved.utility, fixtures.DISTORTION_FREE, places=3,
        )
        self.assertAlmostEqual(
            records[0].achieved.utility,
            records[1].achieved.utility,
            delta=1e-6,
        )
        self.assertEqual(state.z_sizes, (2, 2))
        self.assertEqual(state.pz_given_x.shape, (4, 2))

    def test_realised_value_drives_sampling(self):
        spec = _spec(budget=Budget(eps=1.0, delta=1.0))

        records, _ = sessions.run_session(
            px=self.px, specs=[spec, spec], seed=5, x_true=0,
        )

        # The unconstrained release is the complement of x.
        self.assertEqual([r.sampled for r in records], [1, 1])

    def test_budgets_are_met(self):
        rng = numpy.random.default_rng(13)

        for seed in range(20):
            specs = []
            delta = 0.0
            for step in range(3):
                request = rng.dirichlet(numpy.ones(2), size=2).T
                delta += float(rng.uniform(0.05, 0.2))
                eps = float(rng.uniform(0.0, delta))
                specs.append(_spec(
                    budget=Budget(eps=eps, delta=delta),
                    request=request,
                    label="step{}".format(step),
                ))

            records, state = sessions.run_session(
                px=self.px, specs=specs, seed=seed,
            )

            pz_given_x = numpy.ones((1, 2))
            leakage_before = 0.0
            for spec, record in zip(specs, records):
                j = probability.joint_from_request(
                    px=numpy.array(PX),
                    request_channel=spec.request_channel,
                    pz_given_x=pz_given_x,
                )
                budget = record.budget
                with self.subTest(session=seed, step=record.step):
                    self.assertLessEqual(
                        probability.leakage_individual(ch=record.channel, j=j),
                        budget.eps + 1e-6,
                    )
                    self.assertLessEqual(
                        record.achieved.delta_leak, budget.delta + 1e-6,
                    )
                    self.assertLessEqual(
                        record.cumulative_leakage, budget.delta + 1e-6,
                    )
                    self.assertGreaterEqual(
                        record.cumulative_leakage, leakage_before - 1e-12,
                    )
                    self.assertAlmostEqual(
                        record.cumulative_leakage,
                        record.achieved.delta_leak,
                        places=9,
                    )
                pz_given_x = sessions.compose_pz_given_x(
                    pz_given_x=pz_given_x, ch=record.channel,
                )
                leakage_before = record.cumulative_leakage

            numpy.testing.assert_allclose(
                sessions.recompute_pz_given_x(state=state), state.pz_given_x,
            )
            numpy.testing.assert_allclose(pz_given_x, state.pz_given_x)
            numpy.testing.assert_allclose(
                state.pz_given_x.sum(axis=0), numpy.ones(2),
            )

    def test_repeated_request_under_an_active_budget(self):
        spec = _spec(budget=Budget(eps=0.1, delta=0.3))

        records, _ = sessions.run_session(
            px=self.px, specs=[spec, spec], seed=3,
        )
        first, second = records

        self.assertGreaterEqual(first.achieved.eps_leak, 0.1 - 1e-3)
        self.assertLessEqual(first.achieved.eps_leak, 0.1 + 1e-6)
        self.assertGreater(first.achieved.utility, fixtures.DISTORTION_FREE)
        self.assertAlmostEqual(
            second.achieved.utility, first.achieved.utility, delta=1e-6,
        )
        self.assertLessEqual(second.achieved.eps_leak, 0.1 + 1e-6)
        self.assertGreaterEqual(
            second.achieved.delta_leak, first.cumulative_leakage - 1e-9,
        )
        self.assertLessEqual(second.cumulative_leakage, 0.3 + 1e-6)
        self.assertIsNone(second.budget_effective)

    def test_repeated_deterministic_request_repeats_the_release(self):
        spec = _spec(budget=Budget(eps=5.0, delta=5.0), request=IDENTITY)

        for seed in range(200):
            records, _ = sessions.run_session(
                px=self.px, specs=[spec, spec], seed=seed,
            )

            with self.subTest(seed=seed):
                self.assertEqual(records[1].sampled, records[0].sampled)

    def test_zero_budget_adds_no_leakage(self):
        specs = [
            _spec(mu=LagrangePair(mu1=0.1, mu2=0.1), label="open"),
            _spec(budget=Budget(eps=0.0, delta=0.0), label="closed"),
        ]

        records, state = sessions.run_session(
            px=self.px, specs=specs, seed=6,
        )
        first, second = records

        self.assertGreater(first.cumulative_leakage, 1e-3)
        self.assertIs(second.path, EnumSolvePath.CONSTANT)
        self.assertAlmostEqual(
            second.cumulative_leakage, first.cumulative_leakage, delta=1e-9,
        )
        probs = second.channel.probs
        self.assertTrue(numpy.all(probs == probs[:, :1, :1]))
        self.assertAlmostEqual(
            second.budget_effective.delta, first.cumulative_leakage,
        )
        self.assertEqual(second.budget, Budget(eps=0.0, delta=0.0))
        self.assertAlmostEqual(
            sessions.cumulative_leakage(state=state),
            first.cumulative_leakage,
            delta=1e-9,
        )

    def test_zero_budget_in_a_new_session(self):
        record, state = sessions.handle_request(
            state=sessions.session_new(px=self.px),
            spec=_spec(budget=Budget(eps=0.0, delta=0.0)),
        )

        self.assertIs(record.path, EnumSolvePath.CONSTANT)
        self.assertIsNone(record.budget_effective)
        self.assertAlmostEqual(
            record.achieved.utility, fixtures.DISTORTION_CONSTANT, places=3,
        )
        self.assertAlmostEqual(
            sessions.cumulative_leakage(state=state), 0.0, delta=1e-9,
        )


    def test_decreasing_collusion_budget(self):
        specs = [
            _spec(budget=Budget(eps=0.1, delta=0.3), label="first"),
            _spec(budget=Budget(eps=0.1, delta=0.2), label="second"),
        ]

        with self.assertRaises(excs.BudgetOrderViolation) as context:
            sessions.run_session(px=self.px, specs=specs)

        self.assertIn("Step 2", context.exception.message)
        self.assertIn("second", context.exception.message)

    def test_fixed_multipliers(self):
        mu = LagrangePair(mu1=1.0, mu2=1.0)

        record, state = sessions.handle_request(
            state=sessions.session_new(px=self.px),
            spec=_spec(mu=mu),
        )

        self.assertIs(record.path, EnumSolvePath.FIXED)
        self.assertEqual(record.mu, mu)
        self.assertIsNone(record.budget)
        self.assertEqual(state.delta_floor, 0.0)
        self.assertEqual(record.step, 1)

    def test_states_are_not_mutated(self):
        state = sessions.session_new(px=self.px, seed=2)

        _, state_new = sessions.handle_request(
            state=state, spec=_spec(budget=Budget(eps=0.1, delta=0.2)),
        )

        self.assertEqual(state.step, 0)
        self.assertEqual(state_new.step, 1)
        self.assertEqual(state_new.delta_floor, 0.2)
        self.assertNotEqual(state.rng_state, state_new.rng_state)

    def test_deterministic_for_a_seed(self):
        specs = [
            _spec(budget=Budget(eps=0.1, delta=0.2)),
            _spec(budget=Budget(eps=0.2, delta=0.4)),
        ]

        a, _ = sessions.run_session(px=self.px, specs=specs, seed=9)
        b, _ = sessions.run_session(px=self.px, specs=specs, seed=9)

        self.assertEqual([r.sampled for r in a], [r.sampled for r in b])
        for ra, rb in zip(a, b):
            numpy.testing.assert_array_equal(
                ra.channel.probs, rb.channel.probs,
            )


class SampleReleaseTest(unittest.TestCase):

    N_SAMPLES = 100000

    def setUp(self):
        # One past binary release.
        self.pz_given_x = numpy.array([[0.3, 0.8], [0.7, 0.2]])
        state = sessions.session_new(px=Pmf(probs=PX), seed=11)
        self.state = dataclasses.replace(
            state, pz_given_x=self.pz_given_x, z_sizes=(2,), z_realized=1,
        )
        probs = numpy.zeros((3, 2, 2))
        probs[:, 0, 0] = [0.5, 0.3, 0.2]
        probs[:, 0, 1] = [0.1, 0.1, 0.8]
        probs[:, 1, 0] = [0.6, 0.3, 0.1]
        probs[:, 1, 1] = [0.05, 0.25, 0.7]
        self.ch = Channel(probs=probs)

    def _counts(self, state):
        counts = numpy.zeros(self.ch.n_rhat)
        for _ in range(self.N_SAMPLES):
            sampled, rng_state = sessions.sample_release(
                state=state, ch=self.ch,
            )
            counts[sampled] += 1
            state = dataclasses.replace(state, rng_state=rng_state)

        return counts

    def _check_within_three_sigma(self, counts, expected):
        n = self.N_SAMPLES
        sigma = numpy.sqrt(n * expected * (1.0 - expected))
        for symbol in range(expected.size):
            with self.subTest(symbol=symbol):
                self.assertLessEqual(
                    abs(counts[symbol] - n * expected[symbol]),
                    3.0 * sigma[symbol],
                )

    def test_known_value(self):
        state = dataclasses.replace(self.state, x_true=1)

        counts = self._counts(state=state)

        self._check_within_three_sigma(
            counts=counts, expected=numpy.array([0.05, 0.25, 0.7]),
        )

    def test_unknown_value_conditions_on_past_releases(self):
        pzx = self.pz_given_x[1] * numpy.array(PX)
        posterior = pzx / pzx.sum()
        expected = (
            posterior[0] * numpy.array([0.6, 0.3, 0.1]) +
            posterior[1] * numpy.array([0.05, 0.25, 0.7])
        )

        numpy.testing.assert_allclose(
            sessions.release_probs(state=self.state, ch=self.ch), expected,
        )
        self._check_within_three_sigma(
            counts=self._counts(state=self.state), expected=expected,
        )

    def test_generator_state_advances(self):
        _, rng_state = sessions.sample_release(state=self.state, ch=self.ch)

        self.assertNotEqual(rng_state, self.state.rng_state)


if __name__ == "__main__":
    unittest.main()
