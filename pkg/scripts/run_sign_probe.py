#!/usr/bin/env python3
"""Report the numeric signs of the odd-order limiting constants (their
strict positivity for every pair is an open conjecture; this only prints
evidence, it asserts nothing)."""
import sys

from eigensphere.moments import constant_sign_probe


def main() -> int:
    print(f"{'q':>3} {'d':>3} {'constant':>16}  sign")
    for q, d, c, sign in constant_sign_probe():
        print(f"{q:>3} {d:>3} {c:>16.8g}  {sign}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
