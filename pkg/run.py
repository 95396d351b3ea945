#!/usr/bin/env python3
"""Run the ultrakms command line without installing the package."""

import sys

from ultrakms.main import main

if __name__ == "__main__":
    sys.exit(main())
