"""Shared fixtures and independent oracles.

The oracles below use nothing from spstruct: plain numpy on explicit
vectors and matrices, so the library is checked against a second
implementation rather than against itself.
"""

import numpy as np
import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def haar(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def onb(d, rng):
    """Columns of a random unitary via QR with phase fix."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def oracle_p(x, y):
    return abs(np.vdot(x, y)) ** 2


def oracle_projector(vectors):
    """Orthogonal projector onto the span of the given vectors (any list, not necessarily orthonormal)."""
    V = np.column_stack([np.asarray(v, dtype=complex) for v in vectors])
    u, s, _ = np.linalg.svd(V, full_matrices=False)
    q = u[:, s > 1e-10]
    return q @ q.conj().T


def oracle_alpha_rho(a, b, PX, PY):
    """alpha and rho from the Hilbert-space phase picture: rho cos(psi - theta).

    <a, P_X b> = |.| e^{i theta}; <a, P_Y b> = |.| e^{i psi};
    alpha = 2 Re(<a,P_X b> conj(<a,P_Y b>)), rho = 2 |<a,P_X b>| |<a,P_Y b>|.
    Valid for any a and b, since <a, P_Z b> = <a,P_X b> + <a,P_Y b>.
    """
    u = np.vdot(a, PX @ b)
    v = np.vdot(a, PY @ b)
    return 2 * (u * np.conj(v)).real, 2 * abs(u) * abs(v)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
