#!/usr/bin/env python3
"""Launches the HTTP service (same as `python3 -m hfadvisor.service`)."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hfadvisor.service import main

if __name__ == "__main__":
    raise SystemExit(main())
