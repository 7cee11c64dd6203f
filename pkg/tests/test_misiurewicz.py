import numpy as np
import pytest

from fractalsym.errors import (
    FractalsymError,
    NewtonDiverged,
    NotMinimal,
    NotPeriodic,
    PeriodicNotPreperiodic,
)
from fractalsym.misiurewicz import (
    classify_critical_orbit,
    find_misiurewicz,
    multiplier,
    spatial_derivative_along_orbit,
)


class TestFindMisiurewicz:
    def test_chebyshev_point(self):
        m = find_misiurewicz(1, 1, -2.1)
        assert abs(m.c + 2) < 1e-10
        assert m.residual < 1e-12
        assert abs(m.x_c - 2) < 1e-10
        assert abs(m.multiplier_rho - 4) < 1e-10
        assert abs(m.scale_derivative + 4) < 1e-10

    def test_dendrite_point(self):
        m = find_misiurewicz(1, 2, 0.2 + 1.1j)
        assert abs(m.c - 1j) < 1e-12
        assert abs(m.x_c - (1j - 1)) < 1e-10
        assert abs(m.multiplier_rho - 4 * (1 + 1j)) < 1e-10
        assert abs(m.scale_derivative - 2j) < 1e-10

    def test_no_spurious_root_between_zero_and_half(self):
        # orbit arithmetic oracle: G_{1,1}(c) = f^2(c) - f(c) = c^3 (c + 2),
        # so the only roots are c = 0 (superattracting) and c = -2
        cs = np.linspace(0.001, 0.5, 50)
        assert np.all(cs**3 * (cs + 2) > 1e-9)
        try:
            m = find_misiurewicz(1, 1, 0.3)
        except (NewtonDiverged, PeriodicNotPreperiodic):
            return
        assert abs(m.c + 2) < 1e-10  # only legitimate alternative: basin of -2

    def test_minimality_rejection(self):
        # the (1,1) root c = -2 also satisfies the (1,2) equation; asking for
        # (1,2) near it must reject with the smaller pair
        with pytest.raises(NotMinimal) as ei:
            find_misiurewicz(1, 2, -2.05)
        assert (ei.value.l, ei.value.p) == (1, 1)

    def test_superattracting_rejected(self):
        with pytest.raises((PeriodicNotPreperiodic, NewtonDiverged)):
            find_misiurewicz(1, 1, 0.05)

    def test_local_newton_basin(self):
        m = find_misiurewicz(1, 2, 0.2 + 1.1j)
        for delta in [1e-6, -1e-6, 1e-6j, (7e-7 + 7e-7j)]:
            m2 = find_misiurewicz(1, 2, m.c + delta)
            assert abs(m2.c - m.c) < 1e-10

    def test_repelling_asserted(self):
        for l, p, seed in [(1, 1, -2.1), (1, 2, 0.2 + 1.1j), (1, 3, -1.2 + 0.4j)]:
            m = find_misiurewicz(l, p, seed)
            assert abs(m.multiplier_rho) > 1


class TestMultiplier:
    def test_values(self):
        assert abs(multiplier(-2, 2, 1) - 4) < 1e-12
        assert abs(multiplier(1j, 1j - 1, 2) - (4 + 4j)) < 1e-12
        assert abs(multiplier(0, 0, 1)) < 1e-12  # superattracting, rejected downstream

    def test_not_periodic(self):
        with pytest.raises(NotPeriodic):
            multiplier(1j, 0.5 + 0.5j, 2)

    def test_cycle_start_invariance(self):
        m = find_misiurewicz(1, 3, -1.2 + 0.4j)
        x = m.x_c
        vals = []
        for _ in range(3):
            vals.append(multiplier(m.c, x, 3))
            x = x * x + m.c
        assert all(abs(v - vals[0]) < 1e-10 for v in vals)


class TestClassify:
    def test_examples(self):
        assert classify_critical_orbit(0).kind == "superattracting"
        assert classify_critical_orbit(0).period == 1
        r = classify_critical_orbit(1j)
        assert r.kind == "misiurewicz"
        assert (r.preperiod_from_point, r.preperiod_from_value, r.period) == (2, 1, 2)
        assert classify_critical_orbit(1).kind == "escaping"

    def test_attracting_is_undecided(self):
        assert classify_critical_orbit(-0.5).kind == "undecided"

    def test_consistency_with_solver(self):
        for l, p, seed in [(1, 1, -2.1), (1, 2, 0.2 + 1.1j), (1, 3, -1.2 + 0.4j)]:
            m = find_misiurewicz(l, p, seed)
            r = classify_critical_orbit(m.c)
            assert r.kind == "misiurewicz"
            assert r.preperiod_from_value == l
            assert r.period == p

    def test_scale_derivative_matches_chain_rule(self):
        m = find_misiurewicz(1, 2, 0.2 + 1.1j)
        assert abs(spatial_derivative_along_orbit(m.c, 1) - 2 * m.c) < 1e-12
