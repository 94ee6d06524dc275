import logging
import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import simpson
from scipy.optimize import brentq

from zetalab import zeta
from zetalab.errors import AccuracyError, CapacityError, ConfigError, DomainError
from zetalab.zlb import ZlbCheckpoint

LOW = zeta.EvalConfig(small_t_threshold=30.0)


def _theta_leading(t):
    return 0.5 * t * math.log(t / (2 * math.pi)) - 0.5 * t - math.pi / 8


def test_rs_theta_correction_at_1000():
    t = 1000.0
    assert zeta.rs_theta(t, LOW) - _theta_leading(t) == pytest.approx(1 / (48 * t), abs=1e-9)


def test_rs_theta_at_e_squared():
    t = 2 * math.pi * math.e**2
    lead = t - 0.5 * t - math.pi / 8
    assert _theta_leading(t) == pytest.approx(lead, abs=1e-12)
    assert zeta.rs_theta(t, LOW) == pytest.approx(float(mpmath.siegeltheta(t)), abs=1e-9)
    assert zeta.rs_theta(t, LOW) - lead == pytest.approx(1 / (48 * t), rel=1e-4)


def test_rs_theta_matches_mpmath():
    for t in (1e3, 1e5, 1e6):
        ref = float(mpmath.siegeltheta(t))
        assert zeta.rs_theta(t, LOW) == pytest.approx(ref, abs=1e-12 * max(1, abs(ref)))
        assert zeta.siegel_theta(t) == pytest.approx(ref, abs=1e-9 * max(1, abs(ref)))


def test_rs_theta_below_threshold():
    with pytest.raises(DomainError):
        zeta.rs_theta(10.0, LOW)


def test_z_at_zero():
    ref = float(mpmath.zeta(0.5))
    assert zeta.hardy_z(0.0) == pytest.approx(ref, abs=1e-10)
    assert zeta.hardy_z(0.0) == pytest.approx(-1.4603545088, abs=1e-10)


def test_zsq_at_zero():
    # square of zeta(1/2); the oracle is mpmath, not the rounded listing
    assert zeta.zeta_abs_sq(0.0) == pytest.approx(float(mpmath.zeta(0.5)) ** 2, abs=1e-10)


@pytest.mark.parametrize("lo,hi,root", [(14.0, 14.2, 14.134725), (20.9, 21.1, 21.022040)])
def test_known_zeros(lo, hi, root):
    assert zeta.hardy_z(lo) * zeta.hardy_z(hi) < 0
    r = brentq(zeta.hardy_z, lo, hi, xtol=1e-12)
    assert abs(r - root) <= 1e-6
    assert zeta.zeta_abs_sq(14.134725) <= 1e-6


@pytest.mark.parametrize("t", [35.0, 100.0, 999.5, 1500.0, 12345.6, 1e6 + 0.3])
def test_against_mpmath(t):
    ref = float(mpmath.siegelz(t))
    assert zeta.hardy_z(t) == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("t", [1500.0, 12345.6])
def test_low_threshold_rs_against_mpmath(t):
    assert zeta.hardy_z(t, LOW) == pytest.approx(float(mpmath.siegelz(t)), abs=1e-8)


def test_low_threshold_rs_refuses_small_t():
    # the remainder bound at t = 100 is far above 1e-8
    with pytest.raises(AccuracyError):
        zeta.hardy_z(100.0, LOW)


def test_cross_evaluator_agreement():
    cfg = zeta.DEFAULT_CONFIG
    rng = np.random.default_rng(11)
    t = rng.uniform(cfg.small_t_threshold, cfg.small_t_threshold + 50, 100)
    rs, em = zeta.hardy_z_rs(t, cfg), zeta.hardy_z_em(t, cfg)
    assert np.max(np.abs(rs - em)) <= 2 * cfg.target_abs_error


def test_continuity():
    rng = np.random.default_rng(5)
    t = rng.uniform(1e4, 1e4 + 100, 50)
    assert np.max(np.abs(zeta.hardy_z(t + 1e-6) - zeta.hardy_z(t))) <= 1e-3


def test_nonnegative_and_vectorised():
    t = np.linspace(0, 3000, 5001)
    zsq = zeta.zeta_abs_sq(t)
    assert zsq.shape == t.shape and np.all(zsq >= 0)
    assert zsq[1234] == zeta.zeta_abs_sq(float(t[1234]))


def test_accuracy_error_carries_bound():
    cfg = zeta.EvalConfig(small_t_threshold=30.0, rs_correction_terms=0, target_abs_error=1e-12)
    with pytest.raises(AccuracyError) as info:
        zeta.hardy_z(100.0, cfg)
    assert info.value.achievable > 1e-12


def test_domain_and_config_errors():
    with pytest.raises(DomainError):
        zeta.hardy_z(-1.0)
    with pytest.raises(ConfigError, match="small_t_threshold"):
        zeta.EvalConfig(small_t_threshold=5)
    with pytest.raises(ConfigError, match="rs_correction_terms"):
        zeta.EvalConfig(rs_correction_terms=5)


def test_grid_spacing_rule():
    t = zeta.grid_nodes(100.0)
    gaps = np.diff(t)
    assert t[0] == 0.0 and t[-1] >= 100.0
    assert gaps.max() <= 0.25
    assert np.all(gaps <= 0.5 / np.log(2 + t[1:]) + 1e-12)
    assert np.any(np.isclose(t, 2.0, rtol=0, atol=0))
    idx = np.arange(0, 64) * math.pi / 2
    assert np.all(np.isin(idx, t))


def test_grid_build_and_round_trip(tmp_path):
    g = zeta.build_zeta_grid(200.0)
    assert g.t_values.size == zeta.grid_size(200.0)
    assert np.all(g.zsq_values >= 0)
    path = tmp_path / "g.zlb"
    zeta.save_zeta_grid(path, g)
    back = zeta.load_zeta_grid(path)
    assert back.t_values.tobytes() == g.t_values.tobytes()
    assert back.zsq_values.tobytes() == g.zsq_values.tobytes()
    assert back.config == g.config and back.step_policy == g.step_policy


def test_grid_capacity():
    with pytest.raises(CapacityError):
        zeta.build_zeta_grid(1e4, max_points=1000)
    with pytest.raises(DomainError):
        zeta.grid_nodes(0.5)


def test_refinement_on_first_thousand():
    coarse = zeta.build_zeta_grid(1e3, c_step=0.5)
    fine = zeta.build_zeta_grid(1e3, c_step=0.25)

    end = 636 * math.pi / 2  # last breakpoint below 1e3, a node of both grids

    def integral(g):
        n = int(np.flatnonzero(g.t_values == end)[0]) + 1
        return simpson(g.zsq_values[:n], x=g.t_values[:n])

    a, b = integral(coarse), integral(fine)
    assert abs(a - b) <= 1e-4 * abs(b)


def test_worker_count_does_not_change_values():
    a = zeta.build_zeta_grid(3000.0, workers=1)
    b = zeta.build_zeta_grid(3000.0, workers=4)
    assert a.zsq_values.tobytes() == b.zsq_values.tobytes()


def test_checkpoint_resume(tmp_path, caplog):
    path = tmp_path / "g.ckpt"
    full = zeta.build_zeta_grid(500.0)

    class Interrupt(Exception):
        pass

    class Stopping(ZlbCheckpoint):
        def save(self, done):
            super().save(done)
            if done.size >= 2000:
                raise Interrupt

    with pytest.raises(Interrupt):
        zeta.build_zeta_grid(500.0, checkpoint=Stopping(path, "k", 1000))
    with caplog.at_level(logging.INFO, logger="zetalab.zeta"):
        again = zeta.build_zeta_grid(500.0, checkpoint=ZlbCheckpoint(path, "k", 1000))
    assert "resumed" in caplog.text
    assert again.zsq_values.tobytes() == full.zsq_values.tobytes()
    assert ZlbCheckpoint(path, "other", 1000).load() is None
