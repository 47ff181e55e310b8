import numpy as np
import pytest


def dense_spin(N):
    """Independent dense (Sx, Sy, Sz) built element by element from the ladder action."""
    S = N / 2
    ms = [-S + k for k in range(N + 1)]
    sp = np.zeros((N + 1, N + 1), dtype=complex)
    for col, m in enumerate(ms):
        if col + 1 <= N:
            sp[col + 1, col] = np.sqrt((S - m) * (S + m + 1))
    sm = sp.conj().T
    sz = np.diag(ms).astype(complex)
    return (sp + sm) / 2, (sp - sm) / 2j, sz


def reflection(N):
    return np.eye(N + 1)[::-1]


def random_state(rng, N):
    v = rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _tree_product(mats):
    """mats[n-1] @ ... @ mats[0] by pairwise batched multiplication."""
    while len(mats) > 1:
        if len(mats) % 2:
            tail = mats[-1:]
            mats = mats[:-1]
        else:
            tail = None
        mats = np.matmul(mats[1::2], mats[0::2])
        if tail is not None:
            mats = np.concatenate([mats, tail])
    return mats[0]


def dense_time_ordered_propagator(N, t_f, substeps, cd=True, J=1.0, chunk=50_000):
    """Brute-force U(t_f, 0) = prod_k exp(-i H(t_k) dt), H sampled at step midpoints.

    H(t) is rebuilt from dense spin matrices and the schedule functions, sharing
    nothing with the banded assembly or the Crank-Nicolson kernel.
    """
    from cdcat.schedules import RampSpec, f_finite, gamma

    spec = RampSpec(J=J, t_f=t_f)
    sx, sy, sz = dense_spin(N)
    h_zz = (-2 * J / N) * sz @ sz
    h_cd = (sy @ sz + sz @ sy) / N
    dt = t_f / substeps
    total = np.eye(N + 1, dtype=complex)
    for start in range(0, substeps, chunk):
        k = np.arange(start, min(start + chunk, substeps))
        s = (k + 0.5) / substeps
        omega = -2 * gamma(s, spec)
        f = f_finite(s, spec, N) if cd else np.zeros_like(s)
        hs = h_zz[None] + omega[:, None, None] * sx[None] + f[:, None, None] * h_cd[None]
        w, v = np.linalg.eigh(hs)
        us = np.matmul(v * np.exp(-1j * w * dt)[:, None, :], np.conj(np.swapaxes(v, 1, 2)))
        total = _tree_product(us) @ total
    return total


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line[1])
