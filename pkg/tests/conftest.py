import time

import pytest

from liouville import DiskGeometry, continue_branch


@pytest.fixture(scope="session")
def disk_branch_2049():
    """Continuation branch on the fine radial disk grid, shared by the
    fold and lower-branch acceptance checks.  Returns (geometry, branch,
    wall seconds spent tracing)."""
    geometry = DiskGeometry(2049)
    t0 = time.perf_counter()
    branch = continue_branch(geometry)
    elapsed = time.perf_counter() - t0
    return geometry, branch, elapsed
