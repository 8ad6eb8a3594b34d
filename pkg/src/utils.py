import logging
import time
from pathlib import Path

logger = logging.getLogger(__name__)


def configure_logging(level: str = "WARNING"):
    """
    Sets up root logging for command-line runs. Library code only ever asks for
    module loggers.
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


class Stopwatch:
    """
    Measures wall time of a with-block.
    """

    def __init__(self):
        self.start = 0.0
        self.elapsed = 0.0

    def __enter__(self) -> "Stopwatch":
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc_info):
        self.elapsed = time.perf_counter() - self.start
        return False


def read_text_file(path: Path) -> str:
    """
    Reads a UTF-8 text file, raising FileNotFoundError with a readable message.
    """
    path = Path(path)
    if not path.exists():
        logger.error(f"File does not exist: {path}")
        raise FileNotFoundError(f"No such file: {path}")
    return path.read_text(encoding="utf-8")


def write_text_file(path: Path, content: str) -> Path:
    """
    Writes text to path, creating parent directories as needed.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        logger.info(f"Wrote {path}")
    except OSError as e:
        logger.error(f"Error writing {path}: {e}")
        raise
    return path
