import pytest

import _audit
from nestohedra.face_lattice import FacetSystem

_original_post_init = FacetSystem.__post_init__


def _recording_post_init(self):
    _original_post_init(self)
    _audit.pending.append(self)


FacetSystem.__post_init__ = _recording_post_init


@pytest.fixture(autouse=True)
def dehn_sommerville_audit():
    """Every facet system built by a test must have a palindromic h-vector."""
    yield
    bad = _audit.drain()
    if bad:
        pytest.fail(f"Dehn-Sommerville violated by {len(bad)} system(s): {bad[:3]}")


def pytest_terminal_summary(terminalreporter):
    if not _audit.results and not _audit.checked:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_audit.results):
        ok, detail = _audit.results[n]
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    tr.write_line(
        f"Dehn-Sommerville audit: {len(_audit.checked)} distinct facet systems, "
        f"{len(_audit.violations)} violation(s)"
    )
