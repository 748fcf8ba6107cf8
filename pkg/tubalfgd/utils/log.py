import logging

from termcolor import colored
from tqdm import tqdm


class ColoredFormatter(logging.Formatter):
    """
    Colors a whole record by its level.

    Solver traces and experiment summaries share one terminal, so the level
    color is what separates a diverging run from routine progress.
    """

    COLORS = {
        "DEBUG": "cyan",
        "INFO": "green",
        "WARNING": "yellow",
        "ERROR": "red",
        "CRITICAL": "magenta",
    }

    def format(self, record):
        return colored(super().format(record), self.COLORS.get(record.levelname, "white"))


class TqdmHandler(logging.StreamHandler):
    """
    Stream handler that writes through ``tqdm.write``.

    Experiment runs draw a progress bar; records emitted while it is active
    are printed above the bar instead of breaking it.
    """

    def emit(self, record):
        try:
            tqdm.write(self.format(record), file=self.stream)
            self.flush()
        except Exception:
            self.handleError(record)


def _build_logger(name: str, fmt: str) -> logging.Logger:
    logger = logging.getLogger(name)
    handler = TqdmHandler()
    handler.setFormatter(ColoredFormatter(fmt))
    logger.addHandler(handler)
    logger.setLevel(logging.INFO)
    logger.propagate = False
    return logger


dev_logger = _build_logger("tubalfgd.dev", "%(asctime)s - %(levelname)s - %(message)s")
progress_logger = _build_logger("tubalfgd.progress", "%(message)s")

dev_mode = False


def set_dev_mode(mode: bool):
    """
    Switch development mode on or off.

    In development mode the dev logger drops to ``DEBUG`` and debug, info,
    warning and error records are shown. Otherwise only critical records and
    progress lines reach the terminal.

    Args:
        mode: True to enable development mode, False to disable it.
    """
    global dev_mode
    dev_mode = mode
    dev_logger.setLevel(logging.DEBUG if mode else logging.INFO)


def set_level(level):
    dev_logger.setLevel(level)


def debug(message):
    if dev_mode:
        dev_logger.debug(message)


def info(message):
    if dev_mode:
        dev_logger.info(message)


def warning(message):
    if dev_mode:
        dev_logger.warning(message)


def error(message):
    if dev_mode:
        dev_logger.error(message)


def critical(message):
    """
    Log a critical message whatever the development mode.

    Failures are reported through exit codes, so nothing is raised here.
    """
    dev_logger.critical(message)


def iteration(t: int, **values: float):
    """
    Debug-log one solver iteration as ``iter t: key=value ...``.

    Args:
        t: Iteration index.
        **values: Scalars to report, printed in scientific notation.
    """
    if dev_mode:
        fields = " ".join(f"{key}={value:.3e}" for key, value in values.items())
        dev_logger.debug(f"iter {t}: {fields}")


def color_print(message, **kwargs):
    """
    Print a user-facing progress line.

    Args:
        message: The line to print.
        **kwargs: Passed on to the progress logger.
    """
    progress_logger.info(message, **kwargs)
