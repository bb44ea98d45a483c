# coding=utf-8

import io
import os
import json
import tempfile
import contextlib
import unittest
import unittest.mock

from adaptpriv import adaptpriv
from adaptpriv import commands
from adaptpriv import exports

from tests import fixtures


class MainTestBase(unittest.TestCase):

    def setUp(self):
        self.dir_tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.dir_tmp.cleanup)

    def path(self, name: str) -> str:
        return os.path.join(self.dir_tmp.name, name)

    def run_main(self, *argv):
        """ Runs the front end returning its exit code, standard-out and
            standard-error.
        """

        stdout = io.StringIO()
        stderr = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            with contextlib.redirect_stderr(stderr):
                code = adaptpriv.main(["--threads", "1"] + list(argv))

        return code, stdout.getvalue(), stderr.getvalue()

    @staticmethod
    def fields(stdout: str) -> dict:
        """ Parses `key=value` lines, later keys overriding earlier ones."""

        fields = {}
        for line in stdout.splitlines():
            key, _, value = line.partition("=")
            fields[key] = value
        return fields

    def assertErrorLine(self, stderr: str, code: str, exit_code: int):
        prefix = "error: code={0} exit={1} message=".format(code, exit_code)
        self.assertTrue(
            any(line.startswith(prefix) for line in stderr.splitlines()),
            msg=stderr,
        )


class ValidateTest(MainTestBase):

    def test_instance(self):
        code, stdout, _ = self.run_main(
            "--config", fixtures.instance_path("reference.json"), "validate",
        )

        self.assertEqual(code, 0)
        fields = self.fields(stdout)
        self.assertEqual(fields["kind"], "instance")
        self.assertEqual(fields["shape"], "(2,2,2)")
        self.assertEqual(fields["status"], "ok")

    def test_session(self):
        code, stdout, _ = self.run_main(
            "--config",
            fixtures.instance_path("reference_session.json"),
            "validate",
        )

        self.assertEqual(code, 0)
        fields = self.fields(stdout)
        self.assertEqual(fields["kind"], "session")
        self.assertEqual(fields["requests"], "3")

    def test_config_from_environment(self):
        environ = {"ADAPTPRIV_CONFIG": fixtures.instance_path("reference.json")}
        with unittest.mock.patch.dict(os.environ, environ):
            code, stdout, _ = self.run_main("validate")

        self.assertEqual(code, 0)
        self.assertEqual(self.fields(stdout)["status"], "ok")

    def test_missing_config(self):
        code, _, stderr = self.run_main(
            "--config", self.path("missing.json"), "validate",
        )

        self.assertEqual(code, 2)
        self.assertErrorLine(stderr, "ConfigFileNotFound", 2)

    def test_malformed_json(self):
        fname = self.path("broken.json")
        with open(fname, "w", encoding="utf-8") as fout:
            fout.write("{")

        code, _, stderr = self.run_main("--config", fname, "validate")

        self.assertEqual(code, 2)
        self.assertErrorLine(stderr, "ParseError", 2)

    def test_not_normalized_joint(self):
        fname = self.path("instance.json")
        with open(fname, "w", encoding="utf-8") as fout:
            json.dump({
                "schema": 1,
                "problem": "distortion",
                "alphabets": {"r": 2, "z": 1, "x": 2},
                "joint": [[[0.5, 0.5]], [[0.5, 0.5]]],
            }, fout)

        code, _, stderr = self.run_main("--config", fname, "validate")

        self.assertEqual(code, 2)
        self.assertErrorLine(stderr, "NotNormalized", 2)


class UsageTest(MainTestBase):

    def test_no_command(self):
        code, _, stderr = self.run_main(
            "--config", fixtures.instance_path("reference.json"),
        )

        self.assertEqual(code, 2)
        self.assertErrorLine(stderr, "UsageError", 2)

    def test_unknown_option(self):
        code, _, stderr = self.run_main("validate", "--frobnicate")

        self.assertEqual(code, 2)
        self.assertErrorLine(stderr, "UsageError", 2)

    def test_invalid_thread_count(self):
        code, _, stderr = self.run_main(
            "--threads",
            "0",
            "--config",
            fixtures.instance_path("reference.json"),
            "validate",
        )

        self.assertEqual(code, 2)
        self.assertErrorLine(stderr, "UsageError", 2)

    def test_negative_multiplier(self):
        code, stdout, stderr = self.run_main(
            "--config",
            fixtures.instance_path("reference.json"),
            "ba-run",
            "--mu1",
            "-1",
            "--mu2",
            "1",
        )

        self.assertEqual(code, 2)
        self.assertEqual(stdout, "")
        self.assertErrorLine(stderr, "UsageError", 2)

    def test_unhandled_error(self):
        with unittest.mock.patch.object(
            commands, "cmd_validate", side_effect=RuntimeError("boom"),
        ):
            code, _, stderr = self.run_main(
                "--config", fixtures.instance_path("reference.json"), "validate",
            )

        self.assertEqual(code, 1)
        self.assertIn(
            "error: code=UnhandledError exit=1 message=boom", stderr,
        )


class BaRunTest(MainTestBase):

    def test_small_multipliers(self):
        fname_trace = self.path("trace.csv")

        code, stdout, _ = self.run_main(
            "--config",
            fixtures.instance_path("reference.json"),
            "ba-run",
            "--mu1",
            "0.01",
            "--mu2",
            "0.01",
            "--out",
            fname_trace,
        )

        self.assertEqual(code, 0)
        fields = self.fields(stdout)
        self.assertAlmostEqual(
            float(fields["utility"]), fixtures.DISTORTION_FREE, places=3,
        )
        self.assertEqual(fields["converged"], "true")
        self.assertIn("channel[z=1,x=1]", fields)
        with open(fname_trace, "r", encoding="utf-8") as finp:
            lines = finp.read().splitlines()
        self.assertEqual(lines[0], "iter,objective")
        self.assertEqual(len(lines) - 1, int(fields["iterations"]))


class SolveTest(MainTestBase):

    def test_generous_budget(self):
        code, stdout, _ = self.run_main(
            "--config",
            fixtures.instance_path("reference.json"),
            "solve",
            "--eps",
            "10",
            "--delta",
            "10",
        )

        self.assertEqual(code, 0)
        fields = self.fields(stdout)
        self.assertAlmostEqual(
            float(fields["utility"]), fixtures.DISTORTION_FREE, places=3,
        )
        self.assertEqual(fields["feasible"], "true")
        self.assertEqual(fields["local"], "false")

    def test_budget_order_violation(self):
        code, stdout, stderr = self.run_main(
            "--config",
            fixtures.instance_path("reference.json"),
            "solve",
            "--eps",
            "0.5",
            "--delta",
            "0.3",
        )

        self.assertEqual(code, 4)
        self.assertEqual(stdout, "")
        self.assertErrorLine(stderr, "BudgetOrderViolation", 4)

    def test_half_a_budget(self):
        code, _, stderr = self.run_main(
            "--config",
            fixtures.instance_path("reference.json"),
            "solve",
            "--eps",
            "0.1",
        )

        self.assertEqual(code, 2)
        self.assertErrorLine(stderr, "UsageError", 2)


class TraceTest(MainTestBase):

    def write_instance(self, problem: str) -> str:
        fname = self.path("instance.json")
        with open(fname, "w", encoding="utf-8") as fout:
            json.dump({
                "schema": 1,
                "problem": problem,
                "alphabets": {"r": 2, "z": 2, "x": 2},
                "joint": fixtures.REFERENCE_PROBS,
                "solver": {"max_iters": 2000, "n_init": 2},
                "grid": {"mu1_values": [0.1, 1.0], "mu2_values": [0.1, 1.0]},
            }, fout)
        return fname

    def test_distortion_curve(self):
        fname_out = self.path("curve.csv")

        code, stdout, _ = self.run_main(
            "--config",
            self.write_instance("distortion"),
            "trace",
            "--out",
            fname_out,
        )

        self.assertEqual(code, 0)
        self.assertEqual(self.fields(stdout)["points"], "4")
        rows = exports.read_curve_csv(source=fname_out)
        self.assertEqual(len(rows), 4)
        self.assertEqual({row["provenance"] for row in rows}, {"grid"})

    def test_timeshare_needs_information_problem(self):
        code, _, stderr = self.run_main(
            "--config",
            self.write_instance("distortion"),
            "trace",
            "--out",
            self.path("curve.csv"),
            "--timeshare",
            "10",
        )

        self.assertEqual(code, 2)
        self.assertErrorLine(stderr, "UsageError", 2)

    def test_information_curve_with_timesharing(self):
        fname_out = self.path("curve.csv")

        code, _, _ = self.run_main(
            "--config",
            self.write_instance("mutual-info"),
            "trace",
            "--out",
            fname_out,
            "--timeshare",
            "20",
        )

        self.assertEqual(code, 0)
        rows = exports.read_curve_csv(source=fname_out)
        self.assertEqual(
            sum(1 for row in rows if row["provenance"] == "grid"), 4,
        )


class SessionTest(MainTestBase):

    def test_shipped_session(self):
        fname_out = self.path("session.jsonl")

        code, stdout, _ = self.run_main(
            "--config",
            fixtures.instance_path("reference_session.json"),
            "session",
            "--out",
            fname_out,
        )

        self.assertEqual(code, 0)
        steps = [
            line for line in stdout.splitlines() if line.startswith("step=")
        ]
        self.assertEqual(steps, ["step=1", "step=2", "step=3"])
        entries = exports.read_transcript(source=fname_out)
        self.assertEqual([e["label"] for e in entries], [
            "first", "second", "third",
        ])


if __name__ == "__main__":
    unittest.main()
