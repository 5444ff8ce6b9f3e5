"""Make the test-suite helpers (generator, oracle, case modules) importable from scripts."""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))
