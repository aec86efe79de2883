import logging
import sys
import time

from lamtest import config


class UTCFormatter(logging.Formatter):
    def converter(self, timestamp):
        return time.gmtime(timestamp)


def setup_logging(level: str | None = None):
    """Route every lamtest logger to stderr; stdout stays reserved for command output."""
    formatter = UTCFormatter(
        "%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        "%H:%M:%S",
    )

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)

    logging.basicConfig(
        level=getattr(logging, (level or config.LOG_LEVEL).upper()),
        handlers=[handler],
        force=True,
    )
