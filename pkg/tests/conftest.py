import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from esav import kdv_model, make_grid, nls_model, sg_model

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def small_models(n=8):
    """One instance of each model on a small grid, with a smooth state."""
    g2 = make_grid([(0.0, 2 * np.pi)] * 2, (n, n))
    X, Y = g2.mesh()
    z_nls = 0.5 * np.stack(((1 + 0.3 * np.sin(X)) * (1 + 0.2 * np.cos(Y)), 0.3 * np.sin(X + Y)))
    gs = make_grid([(-7.0, 7.0)] * 2, (n, n))
    X, Y = gs.mesh()
    z_sg = np.stack((4 * np.arctan(np.exp(3 - np.hypot(X, Y))), 0.1 * np.cos(np.pi * X / 7)))
    gk = make_grid((-8.0, 8.0), 2 * n)
    x = gk.points(0)
    z_kdv = (0.5 / np.cosh(x / 2) ** 2)[None]
    return {
        "nls": (nls_model(1.0, g2), z_nls),
        "sg": (sg_model(1.0, gs), z_sg),
        "kdv": (kdv_model(1.0, 1.0, gk), z_kdv),
    }


@pytest.fixture(scope="session")
def models():
    return small_models()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion id -> list of (ok, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, ok, detail):
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        parts = ACCEPTANCE[key]
        ok = all(p for p, _ in parts)
        detail = " | ".join(d for _, d in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")
