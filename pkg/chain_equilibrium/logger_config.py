"""
Logging configuration module for the package.

This module sets up the logging configuration for the simulator, allowing
logs to be displayed in the console and saved to a rotating log file in a
'log' directory (override with the ``CHAIN_EQUILIBRIUM_LOG_DIR`` environment
variable). The log file rotates when it reaches a specified size, and a
fixed number of backup log files are kept.

Log messages are formatted with timestamps, log levels, and messages. They
never reach result files.
"""

import logging
import os
from logging.handlers import RotatingFileHandler

# Ensure the directory for log files exists
log_directory = os.environ.get("CHAIN_EQUILIBRIUM_LOG_DIR", "log")
os.makedirs(log_directory, exist_ok=True)

# Log file path and configuration for rotation
log_file_path = os.path.join(log_directory, "chain_equilibrium.log")
max_file_size = 5 * 1024 * 1024  # 5 MB
backup_count = 3

rotating_handler = RotatingFileHandler(
    log_file_path, maxBytes=max_file_size, backupCount=backup_count
)

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(levelname)s - %(message)s",
    handlers=[
        logging.StreamHandler(),
        rotating_handler,
    ],
)

logger = logging.getLogger("chain_equilibrium")
