"""Shared fixtures and the acceptance summary printed after each run."""

import numpy as np
import pytest

from mriaug.phantom import PhantomSpec, Structure, build_phantom
from mriaug.pipeline import Sample
from mriaug.volume import Volume


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance test, printed as its own section."""
    reports = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", None) != "call":
                continue
            if "test_acceptance" in rep.nodeid:
                reports.append(rep)
    if not reports:
        return
    terminalreporter.section("acceptance criteria")
    for rep in sorted(reports, key=lambda r: r.nodeid):
        status = "PASS" if rep.passed else "FAIL"
        name = rep.nodeid.split("::", 1)[-1]
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture(scope="session")
def head_phantom():
    """Multi-label 64-cube: nested structures over a gradient background."""
    spec = PhantomSpec(
        shape=(64, 64, 64),
        background=0.05,
        gradient_axis=2,
        gradient_amplitude=0.1,
        structures=(
            Structure("ellipsoid", (31.5, 31.5, 31.5), (24.0, 20.0, 22.0), 0.55, 1),
            Structure("sphere", (31.5, 31.5, 31.5), (12.0, 12.0, 12.0), 0.85, 2),
            Structure("box", (22.0, 40.0, 30.0), (4.0, 5.0, 3.0), 0.35, 3),
            Structure("sphere", (44.0, 24.0, 36.0), (5.0, 5.0, 5.0), 1.0, 4),
        ),
    )
    return build_phantom(spec)


@pytest.fixture(scope="session")
def head_sample(head_phantom):
    image, labels = head_phantom
    return Sample(image=image, labels=labels, id="head")


@pytest.fixture(scope="session")
def smooth_volume():
    """Strictly positive smooth blob: k-space edits keep it non-negative,
    so the magnitude step is the identity and truncation is observable
    exactly."""
    n = 48
    x = np.arange(n, dtype=np.float64) - (n - 1) / 2.0
    r2 = (
        x[:, None, None] ** 2 + x[None, :, None] ** 2 + x[None, None, :] ** 2
    )
    data = 0.55 + 0.40 * np.exp(-r2 / (2.0 * 80.0))
    return Volume(data.astype(np.float32), (1.0, 1.0, 1.0), np.eye(4))
