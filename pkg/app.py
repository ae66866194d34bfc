"""Command line entry point: ``python app.py <subcommand> [options]``."""
from hyperstack.cli import main

if __name__ == "__main__":
    main()
