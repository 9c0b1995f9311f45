#!/usr/bin/env python3
# gdblow.py
# Command-line entry: python gdblow.py <command> ...

import sys

from src.CommandLine import main

if __name__ == "__main__":
    sys.exit(main())
