import math

import numpy as np
import pytest

from reduced_action import (
    PathConfig,
    PathConfigError,
    conserved_density,
    load_path_config,
    phi_eval,
    phi_terms_needed,
    reduced_action_residual,
    reduced_action_value,
)


def phi_reference(x: float, q: float, terms: int = 2000) -> float:
    offset = 1.0 / (q**2 * (1 - q**2))
    return sum(q ** (2 * r) / (offset + q ** (2 * r) * x) for r in range(terms))


@pytest.mark.parametrize("q", [0.3, 0.5, 0.9])
@pytest.mark.parametrize("x", [0.0, 0.7, 12.0])
def test_phi_matches_long_sum(q, x):
    assert phi_eval(x, q) == pytest.approx(phi_reference(x, q), abs=1e-11)


def test_phi_at_zero_is_q_squared():
    # sum_r q^{2r} q^2 (1 - q^2) = q^2
    assert phi_eval(0.0, 0.5) == pytest.approx(0.25)


def test_phi_vectorized():
    xs = np.array([0.0, 1.0, 4.0])
    values = phi_eval(xs, 0.6)
    assert values.shape == (3,)
    assert np.all(np.diff(values) < 0)


def test_phi_domain():
    with pytest.raises(PathConfigError):
        phi_eval(1.0, 1.2)
    with pytest.raises(PathConfigError):
        phi_eval(-1.0, 0.5)
    with pytest.raises(PathConfigError):
        phi_eval(1.0, 0.5, tol=0.0)


def test_terms_needed_bounds_the_tail():
    count = phi_terms_needed(0.5, 1e-12)
    assert 0.5 ** (2 * count) <= 1e-12


def constant_path(**overrides) -> PathConfig:
    values = dict(q=0.5, grid=np.linspace(0.0, 10.0, 100).tolist(), rho=1.3)
    values.update(overrides)
    return PathConfig(**values)


class TestResidual:
    def test_constant_rho_is_stationary(self):
        assert np.max(np.abs(reduced_action_residual(constant_path()))) < 1e-12

    def test_perturbed_rho_is_not(self):
        t = np.linspace(0.0, 10.0, 100)
        cfg = constant_path(rho=(1 + 0.1 * np.sin(t)).tolist())
        assert np.max(np.abs(reduced_action_residual(cfg))) > 1e-3

    def test_residual_ignores_nu(self):
        t = np.linspace(0.0, 10.0, 100)
        rho = (1 + 0.1 * np.sin(t)).tolist()
        plain = reduced_action_residual(constant_path(rho=rho))
        shifted = reduced_action_residual(constant_path(rho=rho, nu=(0.3 * t).tolist()))
        assert np.allclose(plain, shifted)

    def test_conserved_density(self):
        cfg = constant_path()
        expected = 1.3**2 * phi_eval(1.3**2 / math.sqrt(0.5), 0.5)
        assert np.allclose(conserved_density(cfg), expected)


class TestActionValue:
    def test_constant_path_is_pure_potential(self):
        value = reduced_action_value(constant_path())
        assert value.imag == pytest.approx(0.0, abs=1e-12)
        assert value.real == pytest.approx(-10.0 * 1.3**2 / math.sqrt(0.5))

    def test_nu_drift_enters_the_imaginary_part(self):
        t = np.linspace(0.0, 10.0, 100)
        value = reduced_action_value(constant_path(nu=(0.3 * t).tolist()))
        phi = phi_eval(1.3**2 / math.sqrt(0.5), 0.5)
        assert value.imag == pytest.approx(10.0 * phi * 1.3**2 * 0.3 / math.sqrt(0.5))


class TestValidation:
    def test_q_range(self):
        with pytest.raises(PathConfigError):
            reduced_action_residual(constant_path(q=1.5))

    def test_grid_must_increase(self):
        with pytest.raises(PathConfigError):
            reduced_action_residual(constant_path(grid=[0.0, 2.0, 1.0]))

    def test_rho_positive(self):
        with pytest.raises(PathConfigError):
            reduced_action_residual(constant_path(rho=-1.0))

    def test_rho_shape(self):
        with pytest.raises(PathConfigError):
            reduced_action_residual(constant_path(rho=[1.0, 2.0]))


class TestConfigFile:
    def test_load(self, tmp_path):
        path = tmp_path / "path.env"
        path.write_text("q=0.5\ngrid=0:10:100\nrho=1.3\nomega=2\n")
        cfg = load_path_config(str(path))
        assert cfg.q == 0.5
        assert cfg.omega == 2.0
        assert len(cfg.grid) == 100
        assert np.max(np.abs(reduced_action_residual(cfg))) < 1e-12

    def test_list_values(self, tmp_path):
        path = tmp_path / "path.env"
        path.write_text("q=0.4\ngrid=0,1,2,3\nrho[]=1,1.1,1.2,1.3\n")
        cfg = load_path_config(str(path))
        assert cfg.rho == [1.0, 1.1, 1.2, 1.3]

    def test_missing_key(self, tmp_path):
        path = tmp_path / "path.env"
        path.write_text("q=0.5\ngrid=0:1:10\n")
        with pytest.raises(PathConfigError):
            load_path_config(str(path))

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "path.env"
        path.write_text("q=0.5\ngrid=0:1:10\nrho=1\nmass=3\n")
        with pytest.raises(PathConfigError):
            load_path_config(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(PathConfigError):
            load_path_config(str(tmp_path / "absent.env"))
