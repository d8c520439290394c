"""Module entry point: python -m planar3rpr ..."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
