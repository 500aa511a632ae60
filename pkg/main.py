"""
Entry point for the orgym command-line tool.

    python main.py gen-debug --out bench.jsonl --seed 7
    python main.py eval --bench bench.jsonl --agent greedy --out records.jsonl

See `python main.py --help` for the full list of subcommands.
"""

import sys
import os

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli import main


if __name__ == "__main__":
    main()
