#!/usr/bin/env python3
"""Reproduce the two headline counting tables from the bundled fixtures.

Runs ``count-subrules`` (with the explicit-catalog oracle enabled) on the
two-agent conditional example and on the chain example, printing each block's
subtotal decomposition and the grand product of strategy-proof two-step rules:

* ``ex1.spdom``  -> subtotals 59 / 46 / 46 / 37, product 4619228
* ``ex2.spdom``  -> 16 subtotals, product 228245070327644160

Exits nonzero if any invocation fails or an oracle disagrees.
"""

from __future__ import annotations

import sys
from pathlib import Path

from spdom.cli import run_command

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def main() -> int:
    worst = 0
    for name in ("ex1.spdom", "ex2.spdom"):
        print(f"== count-subrules --domain fixtures/{name} --oracle ==")
        code = run_command(
            ["count-subrules", "--domain", str(FIXTURES / name), "--oracle"]
        )
        worst = max(worst, code)
        print()
    return worst


if __name__ == "__main__":
    sys.exit(main())
