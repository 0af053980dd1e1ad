"""Entry point for hygrofrac: ``python app.py run single_fibre``."""

import sys

from src.scenarios.cli import main

if __name__ == "__main__":
    sys.exit(main())
