import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from flatnorm import BinarySet, build_complex


def disk_mask(n, r, center=None):
    c = n / 2 if center is None else center
    ys, xs = np.mgrid[0:n, 0:n]
    return (xs + 0.5 - c) ** 2 + (ys + 0.5 - c) ** 2 <= r * r


def mask_set(mask):
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    return BinarySet.from_mask(build_complex(2, (w, h)), mask)


@pytest.fixture
def rng():
    return np.random.default_rng(20061017)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
