# coding=utf-8

import unittest
import unittest.mock

import attrdict

from adaptpriv import sentry


class InitializeSentryTest(unittest.TestCase):

    def test_skipped_without_dsn(self):
        with unittest.mock.patch("sentry_sdk.init") as mock_init:
            self.assertFalse(sentry.initialize_sentry(attrdict.AttrDict({})))
            self.assertFalse(
                sentry.initialize_sentry(attrdict.AttrDict({"sentry": {}})),
            )

        mock_init.assert_not_called()

    def test_initialized_with_dsn(self):
        cfg = attrdict.AttrDict({"sentry": {"dsn": "https://key@host/1"}})

        with unittest.mock.patch("sentry_sdk.init") as mock_init:
            self.assertTrue(sentry.initialize_sentry(cfg))

        mock_init.assert_called_once_with(
            dsn="https://key@host/1", send_default_pii=False,
        )


if __name__ == "__main__":
    unittest.main()
