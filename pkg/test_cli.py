"""
test_cli.py - Subcommands, output files and exit status
"""

import contextlib
import io
import math
import json
import os
import tempfile

from production_config import load_system_spec
from main_tifs import EXIT_INVALID, EXIT_OK, EXIT_USAGE, main


def _run(*argv):
    """(exit status, standard output) of one CLI call."""
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = main(list(argv))
    return status, out.getvalue()


def _run_to_file(*argv, binary=False):
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "result")
        status, _ = _run(*argv, "--out", path)
        with open(path, "rb" if binary else "r", **({} if binary else {"encoding": "utf-8"})) as f:
            return status, f.read()


def test_validate():
    status, out = _run("validate", "--config", "FIB")
    assert status == EXIT_OK
    assert out.startswith("OK FIB: M=1")

    spec = load_system_spec("BIN")
    for m in spec["maps"]:
        m["a"] = 2
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "bad.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(spec, f)
        assert _run("validate", "--config", path)[0] == EXIT_INVALID
    assert _run("validate", "--config", "/nonexistent/system.json")[0] == EXIT_INVALID


def test_usage_errors():
    assert _run("bogus")[0] == EXIT_USAGE
    assert _run("omega", "--config", "FIB")[0] == EXIT_USAGE
    assert _run("omega", "--config", "FIB", "-k", "-1")[0] == EXIT_USAGE
    assert _run("tiles", "--config", "GD2", "--theta", "33")[0] == EXIT_USAGE
    assert _run("render", "--config", "BIN", "--cloud", "chaos", "--points", "10")[0] == EXIT_USAGE


def test_unwritable_output():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "missing", "fib.svg")
        status, out = _run("render", "--config", "FIB", "-k", "2", "--out", path)
        assert (status, out) == (EXIT_USAGE, "")
        assert not os.path.exists(path)


def test_omega():
    assert _run("omega", "--config", "FIB", "-k", "2") == (EXIT_OK, "111\n112\n12\n21\n22\n")
    status, out = _run("omega", "--config", "FIB", "-k", "1", "--details")
    assert out == "11 2 l\n12 3 s\n2 2 l\n"


def test_tiles():
    status, out = _run("tiles", "--config", "FIB", "-k", "3")
    assert status == EXIT_OK
    lines = out.splitlines()
    assert len(lines) == 8
    assert "".join(line.split()[2] for line in lines) == "lsllslsl"

    status, out = _run("tiles", "--config", "BIN", "--theta", "1", "--depth", "4")
    assert status == EXIT_OK
    assert all(" | " in line for line in out.splitlines())
    assert _run("tiles", "--config", "BIN", "--theta", "1") == _run("tiles", "--config", "BIN", "--theta", "1")


def test_addresses():
    status, out = _run("addresses", "--config", "BIN", "--theta", "1")
    assert status == EXIT_OK
    assert out == "∅.11 ∅.1\n∅.12 ∅.2\n∅.21 1.21\n∅.22 1.22\n"


def test_clouds():
    status, out = _run("attractor", "--config", "BIN", "--depth", "1")
    assert (status, out) == (EXIT_OK, "1 0\n1 0.5\n")

    first = _run("chaos", "--config", "SIER", "--points", "50", "--seed", "9")
    assert first[0] == EXIT_OK and len(first[1].splitlines()) == 50
    assert first == _run("chaos", "--config", "SIER", "--points", "50", "--seed", "9")


def test_dimension():
    assert _run("dimension", "--config", "BIN") == (EXIT_OK, "1.0000000000\n")
    status, out = _run("dimension", "--config", "SIER")
    assert status == EXIT_OK
    assert abs(float(out) - math.log2(3)) < 1e-8


def test_equiv():
    status, out = _run("equiv", "--config", "BIN", "--theta", "1", "--psi", "2", "--common-tail")
    assert status == EXIT_OK and out.startswith("equivalent p=1 q=1 E: ")

    status, out = _run("equiv", "--config", "FIB", "--theta", "1", "--psi", "2", "--common-tail", "--bound", "3")
    assert status == EXIT_OK and out.startswith("inconclusive")


def test_inflate_deflate():
    status, deflated = _run("deflate", "--config", "FIB", "-k", "4")
    assert status == EXIT_OK and len(deflated.splitlines()) == 8
    status, inflated = _run("inflate", "--config", "FIB", "-k", "2")
    assert status == EXIT_OK and len(inflated.splitlines()) == 8
    assert _run("deflate", "--config", "FIB", "-k", "0")[0] == EXIT_USAGE


def test_rigidity():
    status, out = _run("rigidity", "--config", "BIN", "--depth", "10")
    assert status == EXIT_OK
    assert out.startswith("locally rigid: no (fails")
    status, out = _run("rigidity", "--config", "FIB", "--depth", "10")
    assert out.startswith("locally rigid: yes (passes")


def test_render_outputs():
    first = _run_to_file("render", "--config", "SIER", "--cloud", "chaos", "--points", "2000", "--seed", "3",
                         binary=True)
    assert first[0] == EXIT_OK
    assert first[1].startswith(b"P6\n800 800\n255\n")
    assert first == _run_to_file("render", "--config", "SIER", "--cloud", "chaos", "--points", "2000",
                                 "--seed", "3", binary=True)

    status, svg = _run_to_file("render", "--config", "FIB", "-k", "3")
    assert status == EXIT_OK
    assert svg.count('stroke="black"') == 8


if __name__ == "__main__":
    from check_runner import run_checks
    run_checks("COMMAND LINE TESTS", globals())
