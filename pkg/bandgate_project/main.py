#!/usr/bin/env python3
"""
bandgate command-line entry point.

Runs the CLI straight from a source checkout: python main.py train --help
"""

import sys
from pathlib import Path

# Add src to Python path
project_root = Path(__file__).parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))


def main():
    """Main application entry point."""
    from bandgate.cli.commands import main as cli_main
    cli_main()


if __name__ == "__main__":
    main()
