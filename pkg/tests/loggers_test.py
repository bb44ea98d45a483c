# coding=utf-8

import logging
import unittest

from adaptpriv import loggers


class LoggersTest(unittest.TestCase):

    def test_single_handler_on_repeated_creation(self):
        logger = loggers.create_logger(logger_name="adaptpriv.tests.repeat")
        logger = loggers.create_logger(logger_name="adaptpriv.tests.repeat")

        self.assertEqual(len(logger.handlers), 1)
        self.assertFalse(logger.propagate)

    def test_recreation_updates_level(self):
        loggers.create_logger(logger_name="adaptpriv.tests.level")
        logger = loggers.create_logger(
            logger_name="adaptpriv.tests.level", logger_level="ERROR",
        )

        self.assertEqual(logger.level, logging.ERROR)

    def test_set_level_reaches_package_loggers(self):
        ours = loggers.create_logger(logger_name="adaptpriv.tests.ours")
        other = loggers.create_logger(logger_name="elsewhere.tests.other")

        loggers.set_level("WARNING")
        self.addCleanup(loggers.set_level, "INFO")

        self.assertEqual(ours.level, logging.WARNING)
        self.assertEqual(other.level, logging.INFO)

    def test_colourless_stream(self):
        logger = loggers.create_logger(
            logger_name="adaptpriv.tests.plain", do_color_logs=False,
        )

        formatter = logger.handlers[0].formatter
        self.assertNotIn("log_color", formatter._fmt)
        self.assertIn("adaptive-privacy", formatter._fmt)


if __name__ == "__main__":
    unittest.main()
