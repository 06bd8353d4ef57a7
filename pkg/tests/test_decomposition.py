import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyharm.decomposition import (
    CutoffFamily,
    DyadicBump,
    hankel_transform,
    partition_residual,
    phi,
    psi,
    psi_hat_profile,
    psi_j,
    psi_radial,
    smooth_step,
)
from polyharm.oracles import lattice_integral


def test_geometry_and_phi_examples():
    fam = CutoffFamily(1.5)
    assert (fam.a, fam.b) == (0.5, 1.0)
    assert phi(fam, 0.4) == 1.0
    assert phi(fam, 1.2) == 0.0
    assert phi(fam, 0.75) == 0.5
    d = CutoffFamily()
    assert d.b == 2 * d.a
    with pytest.raises(ValueError):
        CutoffFamily(3.0)
    with pytest.raises(ValueError):
        phi(d, -0.1)


def test_phi_monotone_and_squeezed():
    for r in (0.1, 1.0, 2.9):
        fam = CutoffFamily(r)
        t = np.linspace(0, 3, 30001)
        v = phi(fam, t)
        assert np.all(np.diff(v) <= 0)
        lower = (t <= fam.a).astype(float)
        upper = (t <= fam.b).astype(float)
        assert np.all(lower <= v) and np.all(v <= upper)


def test_polynomial_profiles_are_steps():
    u = np.linspace(0, 1, 101)
    for k in (1, 3, 8):
        s = smooth_step(u, f"poly{k}")
        assert s[0] == 0 and s[-1] == 1 and np.all(np.diff(s) >= 0)
        assert math.isclose(smooth_step(0.5, f"poly{k}"), 0.5, abs_tol=1e-15)
    with pytest.raises(ValueError):
        smooth_step(u, "poly9")


def test_psi_j_examples(fam):
    assert psi_j(fam, 3, np.zeros(2)) == 0
    assert psi_j(fam, 2, np.array([fam.b * 4 + 1e-9, 0.0])) == 0
    for j in (1, 2, 5):
        assert psi_j(fam, j, fam.a * 2.0**j) == 1.0
    bump = DyadicBump(fam, 3)
    lo, hi = bump.support
    assert bump(np.array([lo])) == 0 and bump(np.array([hi])) == 0


def test_support_annulus_exact(fam):
    rho = np.linspace(0, 200, 400001)
    for j in range(1, 7):
        v = psi_j(fam, j, rho[:, None])
        outside = (rho <= fam.a * 2.0 ** (j - 1)) | (rho >= fam.b * 2.0**j)
        assert np.all(v[outside] == 0)
        assert np.all(v >= 0)


def test_partition_examples(fam, rng):
    x = rng.uniform(-5, 5, size=(1000, 3))
    assert np.max(np.abs(partition_residual(fam, x, 1))) <= 1e-14
    assert partition_residual(fam, np.zeros(3), 7) == 0
    pts = rng.standard_normal((1000, 2))
    pts *= (rng.uniform(0, 100, 1000) / np.linalg.norm(pts, axis=1))[:, None]
    assert np.max(np.abs(partition_residual(fam, pts, 20))) <= 1e-12
    assert np.all(phi(fam, np.linalg.norm(pts, axis=1) / 2.0**20) == 1)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.05, 2.95), rho=st.floats(0, 1e7), J=st.integers(1, 20))
def test_telescoping_property(r, rho, J):
    fam = CutoffFamily(r)
    assert abs(partition_residual(fam, np.array([rho, 0.0]), J)) <= 1e-12


def test_hankel_matches_lattice_quadrature(fam):
    for dims in (1, 2, 3):
        table = psi_hat_profile(fam, dims)
        direct = lattice_integral(lambda s: psi_radial(fam, s), dims, 0.01 if dims < 3 else 0.02, fam.b + 0.1)
        assert abs(table(0.0) - direct / (2 * math.pi) ** (dims / 2)) < 1e-6


def test_psi_hat_is_real_radial_and_dilates(fam):
    table = psi_hat_profile(fam, 2)
    # full complex 2D transform at a few points by Cartesian quadrature
    h = 0.005
    ax = np.arange(-fam.b, fam.b + h, h)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    vals = psi(fam, np.stack([X, Y], axis=-1)) * h * h / (2 * math.pi)
    for rho in (0.5, 3.0, 7.0):
        a = np.sum(vals * np.exp(-1j * rho * X))
        b = np.sum(vals * np.exp(-1j * rho * (X + Y) / math.sqrt(2)))
        peak = abs(table(0.0))
        assert abs(a.imag) <= 1e-10 * peak and abs(b.imag) <= 1e-10 * peak
        assert abs(a - b) <= 1e-8
        assert abs(a.real - table(rho)) <= 1e-8
    # dilation: transform of psi_j computed directly equals 2^(jN) psi_hat(2^j .)
    j = 2
    zeta = np.array([0.1, 0.7, 1.3])
    lo, hi = fam.a * 2.0 ** (j - 1), fam.b * 2.0**j
    direct = hankel_transform(lambda s: psi_j(fam, j, s[:, None]), (lo, hi), 2, zeta, 2e-3)
    assert np.max(np.abs(direct - table.psi_hat_j(j, zeta))) < 1e-8


def test_psi_hat_decays_fast(fam):
    table = psi_hat_profile(fam, 1)
    rho, v = table.rho, np.abs(table.values)
    env = np.maximum.accumulate(v[::-1])[::-1]
    keep = (rho >= 1) & (env > 1e-15 * env.max())
    slope = np.polyfit(np.log1p(rho[keep]), np.log(env[keep]), 1)[0]
    assert -slope >= 6


def test_table_guards(fam):
    with pytest.raises(ValueError):
        psi_hat_profile(fam, 4)
    with pytest.raises(ValueError):
        psi_hat_profile(fam, 1, samples_per_unit=4)
    with pytest.raises(ValueError):
        psi_hat_profile(fam, 1, rho_max=1e5)


def test_table_csv(tmp_path, fam):
    table = psi_hat_profile(fam, 1, rho_max=10.0)
    table.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "rho,psi_hat_real" and len(lines) == table.rho.size + 1
