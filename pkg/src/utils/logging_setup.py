"""
Logging setup utility.
Configures file and console logging based on the application settings.
"""
import sys
import logging
import logging.handlers
from pathlib import Path
import humanize
from .config import config


def setup_logging(level: str = None) -> None:
    """
    Setup logging based on settings.
    Supports both file and console logging with rotation. The console
    handler writes to stderr so it never mixes with result output.

    Args:
        level: Optional level overriding the configured one
    """
    log_level = level or config.get('logging.level', 'INFO')
    log_format = config.get('logging.format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    file_enabled = config.get('logging.file_enabled', False)
    file_path = config.get('logging.file_path', 'logs/fracbem.log')
    max_file_size = config.get('logging.max_file_size', 10485760)  # 10MB
    backup_count = config.get('logging.backup_count', 5)
    console_enabled = config.get('logging.console_enabled', True)

    numeric_level = getattr(logging, str(log_level).upper(), logging.INFO)
    formatter = logging.Formatter(log_format)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    root_logger.handlers.clear()

    if file_enabled:
        log_file_path = Path(file_path)
        log_file_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            filename=str(log_file_path),
            maxBytes=max_file_size,
            backupCount=backup_count,
            encoding='utf-8'
        )
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    if console_enabled:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(numeric_level)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)

    logger = logging.getLogger(__name__)
    logger.debug("Logging system initialized")
    logger.debug(f"Log level: {log_level}")
    if file_enabled:
        logger.debug(
            f"File logging: {file_path} "
            f"(max {humanize.naturalsize(max_file_size, binary=True)}, {backup_count} backups)"
        )


def log_file_info() -> dict:
    """
    Get information about the current log file.

    Returns:
        Dictionary with log file information
    """
    file_path = Path(config.get('logging.file_path', 'logs/fracbem.log'))

    if file_path.exists():
        size = file_path.stat().st_size
        return {
            'path': str(file_path),
            'size': size,
            'size_human': humanize.naturalsize(size),
            'exists': True
        }
    return {
        'path': str(file_path),
        'size': 0,
        'size_human': humanize.naturalsize(0),
        'exists': False
    }
