"""
Workflow base class.
Follows LSP - every workflow is substitutable for Workflow in RunService.
"""
import logging
from abc import ABC, abstractmethod
from typing import Any

from pydantic import BaseModel

from ..dto.problem_models import RunConfig
from ..utils.config import config


class Workflow(ABC):
    """Abstract base class for the run modes"""

    mode: str = ""

    def __init__(self, chunk_size: int = None):
        self.logger = logging.getLogger(self.__class__.__module__)
        self.chunk_size = chunk_size or config.get('runtime.assembly_chunk_size', 64)

    @abstractmethod
    def run(self, run_config: RunConfig) -> BaseModel:
        """Execute the workflow and return its result record"""
        pass

    @abstractmethod
    def summary_rows(self, result: Any) -> list:
        """(label, value) pairs for the console summary"""
        pass

    def __str__(self) -> str:
        return f"{self.__class__.__name__}(mode={self.mode}, chunk_size={self.chunk_size})"
