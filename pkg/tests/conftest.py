import functools
import warnings

import numpy as np
import pytest

from hqmap.errors import PrecisionWarning
from hqmap.harmonic import analyze, boundary_from_spec
from hqmap.presets import expand_preset

# criterion number -> [title, outcomes, details]
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, [title, [], []])
    entry[1].append(rep.passed)
    entry[2].extend(v for k, v in item.user_properties if k == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_CRITERIA):
        title, outcomes, details = _CRITERIA[n]
        status = "PASS" if outcomes and all(outcomes) else "FAIL"
        extra = f"  ({'; '.join(details)})" if details else ""
        terminalreporter.write_line(f"criterion {n:2d} {status}: {title}{extra}")


@pytest.fixture
def detail(record_property):
    """Attach a short measurement to the acceptance summary line."""
    def add(text):
        record_property("detail", text)
    return add


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@functools.lru_cache(maxsize=None)
def preset_boundary(name, N=1024, M=1024):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        return boundary_from_spec(expand_preset(name), N=N, M=M)


@functools.lru_cache(maxsize=None)
def preset_map(name, N=1024):
    return analyze(preset_boundary(name, N))


ALL_PRESETS = ["circle", "ellipse", "affine", "quadratic", "nonqc", "star", "identity"]
QC_PRESETS = ["circle", "ellipse", "affine", "quadratic", "star", "identity"]


def grid(n):
    return 2 * np.pi * np.arange(n) / n


def random_trig(rng, degree, N, real=False):
    """Samples of a random trigonometric polynomial of the given degree."""
    n = np.arange(-degree, degree + 1)
    c = (rng.standard_normal(n.size) + 1j * rng.standard_normal(n.size)) / (1 + np.abs(n))
    t = grid(N)
    v = np.exp(1j * np.multiply.outer(t, n)) @ c
    return v.real if real else v
