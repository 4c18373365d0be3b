#!/usr/bin/env python3
"""
Fractional single-layer solver.

Usage:
    python solver_app.py --config runs/unit_square.json [--mode verify] [--out results/]

Settings (logging, console summary, assembly chunk size) come from
config/<FRACBEM_ENV>.yml, default development.
"""
import sys
from pathlib import Path

# Add the project root to the Python path when run as a script
sys.path.insert(0, str(Path(__file__).parent))

from src.cli import main  # noqa: E402

if __name__ == "__main__":
    main()
