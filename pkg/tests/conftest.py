import numpy as np
import pytest

_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Recorder for acceptance-criterion outcomes, echoed in the summary."""

    def record(cid: int, label: str, passed: bool, detail: str = ""):
        _ACCEPTANCE.append((cid, label, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, label, passed, detail in sorted(_ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        suffix = f" [{detail}]" if detail else ""
        terminalreporter.write_line(f"criterion {cid:02d} {label}: {status}{suffix}")

from gluecert import make_warped_product, mirror_collar
from gluecert.scalars import polynomial, sin_shifted

PI_3 = np.pi / 3.0


@pytest.fixture(scope="session")
def hemisphere_pair():
    """Double of a geodesic ball of radius pi/3 in the round 4-sphere."""
    h1 = make_warped_product(sin_shifted(PI_3, 1.0), 4, (-0.9, 0.0), side="left")
    return h1, mirror_collar(h1)

@pytest.fixture(scope="session")
def generic_pair():
    """A non-mirror warped pair with strictly convex interface."""
    h1 = make_warped_product(polynomial([1.0, 0.3, 0.1]), 4, (-0.8, 0.0), side="left")
    h2 = make_warped_product(polynomial([1.0, -0.25, 0.05]), 4, (0.0, 0.8), side="right")
    return h1, h2
