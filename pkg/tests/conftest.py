"""Shared helpers for the test suite.

All randomness is drawn from explicitly seeded numpy generators so every
test is reproducible.  The builders here deliberately avoid the package's
own orthonormalize/one_body_unitary so that cross-checks stay two-sided.
"""

import numpy as np

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    """Repeat the per-criterion pass/fail lines after the test summary.

    Output capture hides prints from passing tests, so the acceptance
    module records its verdict lines here and this hook replays them
    where they are always visible.
    """
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def rng_for(seed):
    return np.random.default_rng(seed)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n):
    """Haar-ish unitary built directly from numpy's QR."""
    q, r = np.linalg.qr(random_complex(rng, n, n))
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph[np.newaxis, :]


def random_orthonormal_columns(rng, d, n):
    q, r = np.linalg.qr(random_complex(rng, d, n))
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph[np.newaxis, :]


def random_hermitian(rng, n):
    m = random_complex(rng, n, n)
    return (m + m.conj().T) / 2


def random_antisymmetric(rng, n):
    m = random_complex(rng, n, n)
    return (m - m.T) / 2


def random_mode(rng, d):
    v = random_complex(rng, d)
    return v / np.linalg.norm(v)


def random_orthogonal_pair(rng, d):
    """Two orthonormal mode vectors."""
    q = random_orthonormal_columns(rng, d, 2)
    return q[:, 0], q[:, 1]
