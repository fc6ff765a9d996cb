"""emiscan

The main module for running the program. Run with no arguments to scan the default
copper square scenario, or pass the same arguments as the emiscan command.
"""
import sys

import cli


# The scenario scanned when no arguments are given.
DEFAULT_ARGS = ['scan', 'data/scenarios/cu_square.json', 'out/cu_square']


if __name__ == '__main__':
    sys.exit(cli.main(sys.argv[1:] or DEFAULT_ARGS))
