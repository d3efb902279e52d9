import numpy as np
import pytest

from gblab.algebra import parse_polynomial
from gblab.curvature import Hypersurface
from gblab.sampler import haar_frames, intersect_lines

# (name, ambient N, polynomial, singular points)
VARIETIES = {
    "line": (2, "x2", []),
    "conic": (2, "x0*x1 - x2^2", []),
    "cubic": (2, "x0^3 + x1^3 + x2^3", []),
    "quadric": (3, "x0*x1 - x2*x3", []),
    "nodal_cubic": (2, "x2^2*x0 - x1^2*(x1 + x0)", [("1", "0", "0")]),
    "cuspidal_cubic": (2, "x2^2*x0 - x1^3", [("1", "0", "0")]),
    "crossing_lines": (2, "x0*x1", [("0", "0", "1")]),
    "cone": (3, "x0*x1 - x2^2", [("0", "0", "0", "1")]),
}


def variety(name):
    from fractions import Fraction
    N, text, sings = VARIETIES[name]
    return parse_polynomial(text, N + 1), [tuple(Fraction(x) for x in p) for p in sings]


def random_points(F, count, seed=0):
    """Points of {F = 0} from Haar lines, dropping flagged lines."""
    surf = Hypersurface(F)
    rng = np.random.default_rng(seed)
    a, b = haar_frames(rng, surf.N, count)
    li = intersect_lines(surf, a, b)
    pts = li.points[~li.resample].reshape(-1, surf.N + 1)
    return pts[:count]


# ---------------------------------------------------------------------------------------
# acceptance summary: tests marked with @pytest.mark.criterion(k, "text") contribute one line

_RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    key = (mark.args[0], mark.args[1])
    ok = rep.passed if rep.when == "call" else not rep.failed
    if rep.when == "setup" and ok:
        return
    prev = _RESULTS.get(key, True)
    _RESULTS[key] = prev and ok


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), ok in sorted(_RESULTS.items()):
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {title}")
