import numpy as np


def assert_points_match(got, expected, tol=1e-9):
    """Multiset match of two complex point collections within tol.

    Sorting complex values is unstable when real parts tie up to
    rounding, so compare by greedy nearest matching instead.
    """
    got = list(map(complex, got))
    expected = list(map(complex, expected))
    assert len(got) == len(expected), (got, expected)
    remaining = list(expected)
    for z in got:
        dist = [abs(z - w) for w in remaining]
        k = int(np.argmin(dist))
        assert dist[k] <= tol, (z, remaining, dist[k])
        remaining.pop(k)
