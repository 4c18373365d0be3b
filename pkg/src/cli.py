"""
Command-line entry point.

    fracbem --config PATH [--mode NAME] [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
import re
import sys

import click

from .core.run_service import RunService
from .dto.problem_models import RunModes
from .numerics.errors import ConfigurationError, FracBemError, NumericalError
from .utils.logging_setup import setup_logging

EXIT_OK = 0
EXIT_CONFIGURATION = 2
EXIT_NUMERICAL = 3


def error_kind(error: Exception) -> str:
    """ConfigurationError -> 'configuration', AssemblyError -> 'assembly', ..."""
    name = type(error).__name__.removesuffix("Error") or type(error).__name__
    return re.sub(r'(?<!^)(?=[A-Z])', '_', name).lower()


def report_error(error: Exception) -> None:
    message = " ".join(str(error).split())
    click.echo(f"error: {error_kind(error)}: {message}", err=True)


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
              help="JSON run configuration")
@click.option("--mode", type=click.Choice(RunModes.ALL), default=None,
              help="Override the mode of the configuration")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Override output.directory")
@click.option("--log-level", default=None, help="Override the configured log level")
def main(config_path: str, mode: str, out_dir: str, log_level: str) -> None:
    """Fractional single-layer boundary element solver."""
    setup_logging(log_level)
    service = RunService()
    try:
        service.run(config_path, mode=mode, out_dir=out_dir)
    except ConfigurationError as e:
        report_error(e)
        sys.exit(EXIT_CONFIGURATION)
    except NumericalError as e:
        report_error(e)
        sys.exit(EXIT_NUMERICAL)
    except FracBemError as e:
        report_error(e)
        sys.exit(EXIT_NUMERICAL)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
