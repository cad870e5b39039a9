from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from plbc.algebra import BitMatrix  # noqa: E402
from plbc.code import PbchSpec, pbch_build, pbch_r0, plbc_from_generators  # noqa: E402


@pytest.fixture(scope="session")
def code_n2():
    return plbc_from_generators(BitMatrix.from_strs(["10"]), BitMatrix.from_strs(["11"]))


@pytest.fixture(scope="session")
def code_n7():
    """The [7,3,4] code: G1 = unit rows, G0 = shifts of x^3 + x + 1."""
    return pbch_build(PbchSpec.from_hex(7, "0x1", "0xb"))


@pytest.fixture(scope="session")
def code_n7_r3():
    """The [7,1,3] code with r = 3 (g1 = x^3+x+1, g0 = (x^3+x+1)(x+1))."""
    return pbch_build(PbchSpec.from_hex(7, "0xb", "0x1d"))


@pytest.fixture(scope="session")
def code_n31():
    """Designed distance 5 member of the n = 31, r = 0 family (k=21, l=10, d0=5)."""
    return pbch_build(pbch_r0(31, 5))


@pytest.fixture(scope="session")
def code_n31_d7():
    return pbch_build(pbch_r0(31, 7))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
