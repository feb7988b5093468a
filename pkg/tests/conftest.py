import numpy as np
import pytest

from myostrain.contours import Contour, ContourFrame, normalize_contour
from myostrain.ring import RingSpec

ACCEPTANCE = []


def circle(n, r=1.0, center=(0.0, 0.0), phase=0.0):
    th = 2 * np.pi * (np.arange(n) + phase) / n
    return np.asarray(center) + r * np.stack([np.cos(th), np.sin(th)], axis=1)


@pytest.fixture
def ring_frame():
    return ContourFrame(0, Contour(circle(32, 1.0, phase=0.25)), Contour(circle(32, 2.0, phase=0.25)))


@pytest.fixture
def two_material_spec():
    return RingSpec()


@pytest.fixture
def homogeneous_spec():
    return RingSpec(abnormal_span=0.0)


def star_contour(rng, n, base, amp=0.15, center=(0.0, 0.0)):
    th = np.sort(rng.uniform(0, 2 * np.pi, n))
    r = base * (1 + amp * np.sin(2 * th + rng.uniform(0, 6)) + 0.5 * amp * np.cos(3 * th))
    return normalize_contour(np.asarray(center) + r[:, None] * np.stack([np.cos(th), np.sin(th)], axis=1))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
