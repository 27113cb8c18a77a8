"""structlog setup. Logs go to stderr; stdout carries certificates and reports."""
import logging
import sys

import structlog


def stderr_logger_factory(*args) -> structlog.PrintLogger:
    """A PrintLogger on whatever sys.stderr is when the logger is created."""
    return structlog.PrintLogger(file=sys.stderr)


def configure_logging(level: str = "INFO", json: bool = False) -> None:
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level}")
    renderer = structlog.processors.JSONRenderer() if json else structlog.dev.ConsoleRenderer(colors=False)
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            *([structlog.processors.format_exc_info] if json else []),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=stderr_logger_factory,
        cache_logger_on_first_use=False,
    )
