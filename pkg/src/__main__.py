"""
Module entry point: python -m src --config run.json
"""
from .cli import main

if __name__ == "__main__":
    main()
