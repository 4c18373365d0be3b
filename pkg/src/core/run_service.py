"""
Run orchestrator.
Follows SRP - Single responsibility for coordinating one run.
Follows DIP - Depends on the Workflow abstraction, not on concrete modes.
"""
import logging
import time
from pathlib import Path
from typing import Dict, List, Optional, Type, Union

import humanize
from pydantic import BaseModel, ConfigDict, ValidationError
from rich.console import Console
from rich.table import Table

from ..dto.problem_models import RunConfig, RunModes
from ..numerics.errors import ConfigurationError
from ..services.base import Workflow
from ..services.convergence import ConvergenceService
from ..services.results_writer import ResultsWriter
from ..services.solve import SolveService
from ..services.symbol_check import SymbolCheckService
from ..services.verification import VerificationService
from ..utils.config import config
from ..utils.logging_setup import log_file_info


def validation_message(error: ValidationError) -> str:
    """First validation problem as one line"""
    first = error.errors()[0]
    message = str(first.get('msg', error)).removeprefix("Value error, ")
    location = ".".join(str(part) for part in first.get('loc', ()))
    return f"{location}: {message}" if location else message


class RunOutcome(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mode: str
    config_hash: str
    files: List[Path]
    result: BaseModel
    summary: list


class RunService:
    """
    Validates a run configuration, dispatches it to the workflow of its mode
    and writes the results.
    """

    WORKFLOWS: Dict[str, Type[Workflow]] = {
        RunModes.SOLVE: SolveService,
        RunModes.VERIFY: VerificationService,
        RunModes.CONVERGE: ConvergenceService,
        RunModes.SYMBOL_CHECK: SymbolCheckService,
    }

    def __init__(self, console: Optional[Console] = None):
        self.logger = logging.getLogger(__name__)
        self.console = console or Console()

    def load_config(self, path: Union[str, Path], mode: Optional[str] = None) -> RunConfig:
        """
        Read and validate a JSON run configuration.

        Raises:
            ConfigurationError: Unreadable file or invalid configuration
        """
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as e:
            raise ConfigurationError(f"cannot read configuration {path}: {e}") from e
        try:
            return RunConfig.model_validate_json(text).with_mode(mode)
        except ValidationError as e:
            raise ConfigurationError(validation_message(e)) from e

    def execute(self, run_config: RunConfig, out_dir: Optional[Union[str, Path]] = None) -> RunOutcome:
        """
        Run one configuration and write its result files.

        Args:
            run_config: Validated configuration
            out_dir: Overrides output.directory

        Returns:
            RunOutcome with the written files and the console summary rows
        """
        workflow = self.WORKFLOWS[run_config.mode]()
        config_hash = run_config.config_hash()
        directory = Path(out_dir) if out_dir is not None else Path(run_config.output.directory)
        self.logger.info(f"Starting {run_config.mode} run {config_hash[:12]} with {workflow}")
        started = time.monotonic()

        try:
            result = workflow.run(run_config)
        except Exception as e:
            self.logger.error(f"{run_config.mode} run failed: {e}")
            raise

        writer = ResultsWriter(directory, config_hash, run_config.output.formats)
        writers = {
            RunModes.SOLVE: writer.write_solve,
            RunModes.VERIFY: writer.write_verify,
            RunModes.CONVERGE: writer.write_converge,
            RunModes.SYMBOL_CHECK: writer.write_symbol,
        }
        writers[run_config.mode](result)
        elapsed = humanize.naturaldelta(time.monotonic() - started, minimum_unit='milliseconds')
        self.logger.info(f"{run_config.mode} run finished in {elapsed}; {len(writer.written)} file(s) in {directory}")

        outcome = RunOutcome(mode=run_config.mode, config_hash=config_hash, files=writer.written,
                             result=result, summary=workflow.summary_rows(result))
        if config.get('console.summary_enabled', True):
            self.print_summary(outcome, directory)
        return outcome

    def run(self, path: Union[str, Path], mode: Optional[str] = None,
            out_dir: Optional[Union[str, Path]] = None) -> RunOutcome:
        return self.execute(self.load_config(path, mode), out_dir)

    def print_summary(self, outcome: RunOutcome, directory: Path) -> None:
        table = Table(title=f"fracbem {outcome.mode}", show_header=True, header_style="bold cyan")
        table.add_column("quantity", style="bold")
        table.add_column("value", justify="right")
        for label, value in outcome.summary:
            table.add_row(label, value)
        table.add_row("config hash", outcome.config_hash[:16])
        table.add_row("output", str(directory))
        if config.get('logging.file_enabled', False):
            log_file = log_file_info()
            table.add_row("log file", f"{log_file['path']} ({log_file['size_human']})")
        self.console.print(table)
