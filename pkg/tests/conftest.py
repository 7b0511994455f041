import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from subalg.collections import YCollection, ZCollection
from subalg.spaces import Subspace

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=100, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def complex_points(rng, n, count, lo=0.5, hi=2.0):
    """Points with |z_i| in [lo, hi] and uniform phase."""
    mod = np.exp(rng.uniform(np.log(lo), np.log(hi), (count, n)))
    return mod * np.exp(1j * rng.uniform(-np.pi, np.pi, (count, n)))


def max_err(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


def _block(s: Subspace, extra: np.ndarray, h: int, k: int) -> Subspace:
    top = np.zeros((h + k, s.dim), complex)
    top[:h] = s.frame
    bottom = np.zeros((h + k, extra.shape[1]), complex)
    bottom[h:] = extra
    return Subspace(np.hstack([top, bottom]), ambient_dim=h + k)


def pad_z(c: ZCollection, k: int, rng) -> ZCollection:
    """Direct sum with a k-dimensional block that U never reaches, then mixed by a basis change."""
    h, n = c.ambient_dim, c.n
    q = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))[0]
    cut = int(rng.integers(0, k + 1))
    e = _block(c.e, q[:, :cut], h, k)
    j = _block(c.j, q[:, cut:], h, k)
    r = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))[0]
    bounds = np.sort(rng.integers(0, k + 1, n - 1))
    edges = [0, *bounds.tolist(), k]
    phases = tuple(_block(ph, r[:, edges[i]:edges[i + 1]], h, k) for i, ph in enumerate(c.phases))
    u = _block(c.u, np.zeros((k, 0)), h, k)
    g = np.eye(h + k) + 0.3 * (rng.standard_normal((h + k, h + k)) + 1j * rng.standard_normal((h + k, h + k)))
    mix = lambda s: Subspace(g @ s.frame, ambient_dim=h + k)  # noqa: E731
    return ZCollection(mix(u), mix(e), mix(j), tuple(mix(p) for p in phases))


def pad_y(c: YCollection, k: int, rng) -> YCollection:
    """Same padding for a Y collection (V stays in the original block)."""
    h, n = c.ambient_dim, c.n
    q = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))[0]
    cut = int(rng.integers(0, k + 1))
    e = _block(c.e, q[:, :cut], h, k)
    j = _block(c.j, q[:, cut:], h, k)
    r = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))[0]
    bounds = np.sort(rng.integers(0, k + 1, n - 1))
    edges = [0, *bounds.tolist(), k]
    phases = tuple(_block(ph, r[:, edges[i]:edges[i + 1]], h, k) for i, ph in enumerate(c.phases))
    v = _block(c.v, np.zeros((k, 0)), h, k)
    return YCollection(e, j, v, phases)
