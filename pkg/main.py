"""
msowidth - Entry Point CLI

Utilizzo:
    python main.py <gruppo> <comando> [opzioni]
    python main.py --help
"""

import sys

from src.cli import run


if __name__ == "__main__":
    sys.exit(run())
