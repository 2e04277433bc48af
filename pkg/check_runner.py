"""
check_runner.py - Script runner for the test_*.py modules

`python test_core.py` prints a banner and one [i/n] line per check and
exits 1 on the first failure; pytest collects the same functions.
"""

import sys
import traceback


def run_checks(title, namespace):
    """Run every test_* function of a module namespace in definition order."""
    checks = [f for name, f in list(namespace.items()) if name.startswith("test_") and callable(f)]

    print("=" * 70)
    print(f"  {title}")
    print("=" * 70)

    for i, check in enumerate(checks, 1):
        print(f"\n[{i}/{len(checks)}] {check.__name__}...")
        try:
            check()
            print("  [OK]")
        except Exception as e:
            print(f"  [FAIL] {type(e).__name__}: {e}")
            traceback.print_exc()
            sys.exit(1)

    print("\n" + "=" * 70)
    print(f"  [SUCCESS] ALL {len(checks)} CHECKS PASSED")
    print("=" * 70)
