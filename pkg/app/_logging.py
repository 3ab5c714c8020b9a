import logging
import sys

import structlog


def configure_logging(verbose: bool = False):
    """
    Configure structlog for a CLI run: ISO timestamps, level names and a
    console renderer on stderr. stdout is left to the run report.

    Parameters:
    - verbose (bool): log at DEBUG instead of INFO.
    """
    level = logging.DEBUG if verbose else logging.INFO
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
