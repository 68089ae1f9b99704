# main.py - Entry point for the qgraph command line
import os
import logging
from logging.handlers import RotatingFileHandler
from qgraph_logic.e_cli.commands import qgraph_cli

LOG_FORMAT = "%(asctime)s %(levelname)s-%(name)s: [%(funcName)s] %(message)s"

# Set up logging
logging.basicConfig(
    level=os.environ.get("QGRAPH_LOG_LEVEL", "WARNING").upper(),
    format=LOG_FORMAT)
logger = logging.getLogger(__name__)

# Optional rotating log file next to the console output
log_file_path = os.environ.get("QGRAPH_LOG_FILE")
if log_file_path:
    file_handler = RotatingFileHandler(log_file_path, maxBytes=1_000_000, backupCount=3)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    file_handler.setLevel(logging.INFO)
    logging.getLogger().addHandler(file_handler)
    logger.info(f"[main] Logging to {log_file_path}")


if __name__ == "__main__":
    qgraph_cli()
