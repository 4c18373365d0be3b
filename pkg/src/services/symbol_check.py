"""
Symbol-check workflow: Fourier decay of the smoothly truncated Riesz kernel.
"""
from ..dto.problem_models import RunConfig, RunModes
from ..dto.result_models import SymbolResult
from ..numerics.oracle import symbol_decay_check
from .base import Workflow


class SymbolCheckService(Workflow):

    mode = RunModes.SYMBOL_CHECK

    def run(self, run_config: RunConfig) -> SymbolResult:
        check = run_config.symbol_check
        order = run_config.symbol_order()
        samples = symbol_decay_check(order, check.cutoff_radius, check.r_values)
        worst = max(s.bound_ratio for s in samples)
        self.logger.info(f"Symbol check ({order}, R={check.cutoff_radius:g}): max bound ratio {worst:.4g}")
        return SymbolResult(samples=samples)

    def summary_rows(self, result: SymbolResult) -> list:
        return [(f"r={s.r:g}", f"symbol {s.symbol:.6e}  ratio {s.bound_ratio:.4f}") for s in result.samples]
