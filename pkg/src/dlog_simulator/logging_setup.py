import json
import logging
import sys

HUMAN_FORMAT = "%(asctime)s | %(name)-20s | %(levelname)-7s | %(message)s"


class JSONFormatter(logging.Formatter):
    """Formatter emitting one JSON object per record."""

    def format(self, record):
        log_obj = {
            "timestamp": self.formatTime(record),
            "level": record.levelname,
            "message": record.getMessage(),
            "module": record.module,
        }
        # Contextual fields passed through `extra`
        if hasattr(record, "run_id"):
            log_obj["run_id"] = record.run_id

        return json.dumps(log_obj)


def setup_logging(level: str = "INFO", json_output: bool = False) -> None:
    """Configure the root logger; records go to stderr so stdout stays data-only."""
    logger = logging.getLogger()
    handler = logging.StreamHandler(sys.stderr)
    if json_output:
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(logging.Formatter(HUMAN_FORMAT, datefmt="%H:%M:%S"))
    logger.handlers = [handler]
    logger.setLevel(level.upper())
