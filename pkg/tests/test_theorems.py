"""Tests for the law bookkeeping: predicted laws, transport, chains."""

import functools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import qmc

from iptrans import distributions as dists
from iptrans.distributions import DistributionSpec
from iptrans.stats import ks_one_sample
from iptrans.theorems import (
    AlCaseParams,
    GigCaseParams,
    SexpCaseParams,
    TheoremCase,
    density_transport_residual,
    fixed_point_case,
    iterate_chain,
    predicted_laws,
    swapped_case,
    transform_of,
)

TRANSPORT_CELLS = {
    "gig": [
        TheoremCase.gig(0.5, 1.0, 2.0, 1.0, 0.5),
        TheoremCase.gig(-0.5, 1.0, 1.0, 2.0, 1.0),
        TheoremCase.gig(2.0, 0.3, 5.0, 0.2, 3.0),
        TheoremCase.gig(0.0, 1.0, 1.0, 1.0, 2.0),
    ],
    "al": [
        TheoremCase.al(1.0, 2.0, 3.0),
        TheoremCase.al(0.5, 0.5, 0.5),
        TheoremCase.al(3.0, 0.2, 1.0),
    ],
    "sexp": [
        TheoremCase.sexp(1.0, 2.0, 3.0),
        TheoremCase.sexp(0.5, 1.0, 1.0),
        TheoremCase.sexp(2.0, 3.0, 0.5),
    ],
}
TRANSPORT_TOL = {"gig": 1e-8, "al": 1e-12, "sexp": 1e-12}


def _cdf_of(law):
    return functools.partial(dists.cdf, law)


def _interior_points(case, n):
    """Quasi-random points in the open support of the input product law."""
    laws = predicted_laws(case)
    grid = qmc.Halton(d=2, scramble=False, seed=None).random(n + 1)[1:]
    lo, hi = 1e-3, 1.0 - 1e-3
    u1 = lo + (hi - lo) * grid[:, 0]
    u2 = lo + (hi - lo) * grid[:, 1]
    x = dists._ppf(laws.x_law, u1)
    y = dists._ppf(laws.y_law, u2)
    return x, y


def _law_equal(law, family, *params):
    assert law.family == family
    assert tuple(vars(law.params).values()) == params


class TestValidation:
    def test_gig_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            GigCaseParams(0.5, 0.0, 1.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            GigCaseParams(0.5, 1.0, -1.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            GigCaseParams(0.5, 1.0, 1.0, 2.0, 2.0)
        with pytest.raises(ValueError):
            GigCaseParams(0.5, 1.0, 1.0, 0.0, 2.0)
        with pytest.raises(ValueError):
            GigCaseParams(float("nan"), 1.0, 1.0, 1.0, 2.0)

    def test_al_rejects_nonpositive(self):
        for bad in (0.0, -1.0, float("inf")):
            with pytest.raises(ValueError):
                AlCaseParams(bad, 1.0, 1.0)
            with pytest.raises(ValueError):
                AlCaseParams(1.0, bad, 1.0)
            with pytest.raises(ValueError):
                AlCaseParams(1.0, 1.0, bad)

    def test_sexp_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            SexpCaseParams(0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            SexpCaseParams(1.0, -2.0, 1.0)

    def test_case_type_mismatch(self):
        with pytest.raises(TypeError):
            TheoremCase("gig", AlCaseParams(1.0, 2.0, 3.0))

    def test_unknown_theorem(self):
        with pytest.raises(ValueError):
            TheoremCase("weibull", AlCaseParams(1.0, 2.0, 3.0))

    def test_config_round_trip(self):
        case = TheoremCase.gig(0.5, 1.0, 2.0, 1.0, 0.5)
        assert TheoremCase.from_config(case.to_config()) == case

    def test_label(self):
        assert TheoremCase.al(1.0, 2.0, 3.0).label() == "al(p=1,q=2,r=3)"


class TestPredictedLaws:
    def test_gig_example(self):
        laws = predicted_laws(TheoremCase.gig(0.5, 1.0, 2.0, 1.0, 0.5))
        _law_equal(laws.x_law, "gig", 0.5, 1.0, 2.0)
        _law_equal(laws.y_law, "gig", 0.5, 1.0, 1.0)
        _law_equal(laws.u_law, "gig", 0.5, 2.0, 1.0)
        _law_equal(laws.v_law, "gig", 0.5, 0.5, 2.0)

    def test_al_example(self):
        laws = predicted_laws(TheoremCase.al(1.0, 2.0, 3.0))
        _law_equal(laws.x_law, "al", 1.0, 2.0)
        _law_equal(laws.y_law, "al", 3.0, 3.0)
        _law_equal(laws.u_law, "al", 3.0, 2.0)
        _law_equal(laws.v_law, "al", 5.0, 1.0)

    def test_sexp_example(self):
        laws = predicted_laws(TheoremCase.sexp(1.0, 2.0, 3.0))
        _law_equal(laws.x_law, "stexp", 1.0, -2.0, 3.0)
        _law_equal(laws.y_law, "sexp", 1.0, -3.0)
        _law_equal(laws.u_law, "stexp", 1.0, -3.0, 2.0)
        _law_equal(laws.v_law, "sexp", 1.0, -2.0)

    def test_swap_duality(self):
        for cells in TRANSPORT_CELLS.values():
            for case in cells:
                fwd = predicted_laws(case)
                rev = predicted_laws(swapped_case(case))
                assert rev.x_law == fwd.u_law
                assert rev.y_law == fwd.v_law
                assert rev.u_law == fwd.x_law
                assert rev.v_law == fwd.y_law
                assert swapped_case(swapped_case(case)) == case


class TestTransformOf:
    def test_each_family(self):
        spec = transform_of(TheoremCase.gig(0.5, 1.0, 2.0, 1.5, 0.5))
        assert spec.kind == "f1" and (spec.alpha, spec.beta) == (1.5, 0.5)
        assert transform_of(TheoremCase.al(1.0, 2.0, 3.0)).kind == "f2"
        spec = transform_of(TheoremCase.sexp(1.0, 2.0, 3.0))
        assert spec.kind == "f3" and (spec.c1, spec.c2) == (2.0, 3.0)


class TestFixedPoint:
    def test_detection(self):
        assert fixed_point_case(TheoremCase.gig(0.5, 2.0, 2.0, 1.0, 0.5)) is not None
        assert fixed_point_case(TheoremCase.gig(0.5, 1.0, 2.0, 1.0, 0.5)) is None
        assert fixed_point_case(TheoremCase.al(1.0, 2.0, 1.0)) is not None
        assert fixed_point_case(TheoremCase.al(1.0, 2.0, 3.0)) is None
        assert fixed_point_case(TheoremCase.sexp(1.0, 2.0, 2.0)) is not None
        assert fixed_point_case(TheoremCase.sexp(1.0, 2.0, 3.0)) is None

    def test_fixed_point_laws_are_invariant(self):
        case = TheoremCase.al(1.0, 2.0, 1.0)
        laws = predicted_laws(case)
        assert laws.u_law == laws.x_law
        assert laws.v_law == laws.y_law


class TestTransportResidual:
    def test_al_example_point(self):
        case = TheoremCase.al(1.0, 2.0, 3.0)
        assert density_transport_residual(case, 2.0, 3.0) <= 1e-12

    def test_sexp_example_point(self):
        case = TheoremCase.sexp(1.0, 2.0, 3.0)
        assert density_transport_residual(case, 1.0, 2.0) <= 1e-12

    def test_gig_example_point(self):
        case = TheoremCase.gig(0.5, 1.0, 2.0, 1.0, 0.5)
        assert density_transport_residual(case, 1.0, 1.0) <= 1e-8

    @pytest.mark.parametrize("theorem", ["gig", "al", "sexp"])
    def test_quasi_random_interior_points(self, theorem):
        tol = TRANSPORT_TOL[theorem]
        for case in TRANSPORT_CELLS[theorem]:
            x, y = _interior_points(case, 1000)
            residual = density_transport_residual(case, x, y)
            assert residual.max() <= tol, case.label()

    @pytest.mark.parametrize("theorem", ["gig", "al", "sexp"])
    def test_all_four_laws_normalize(self, theorem):
        case = TRANSPORT_CELLS[theorem][0]
        laws = predicted_laws(case)
        for law in (laws.x_law, laws.y_law, laws.u_law, laws.v_law):
            lo, hi = dists.support(law)
            assert _quad_split(law, lo, hi) == pytest.approx(1.0, abs=1e-8)

    def test_points_off_support_raise(self):
        case = TheoremCase.sexp(1.0, 2.0, 3.0)
        with pytest.raises(ValueError):
            density_transport_residual(case, 4.0, 0.0)  # x above stexp cap
        case = TheoremCase.gig(0.5, 1.0, 2.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            density_transport_residual(case, -1.0, 1.0)

    @given(st.floats(5e-3, 0.995), st.floats(5e-3, 0.995))
    def test_transport_property_al(self, u1, u2):
        case = TheoremCase.al(1.0, 2.0, 3.0)
        laws = predicted_laws(case)
        x = float(dists._ppf(laws.x_law, u1))
        y = float(dists._ppf(laws.y_law, u2))
        if transform_of(case).kind == "f2":
            from iptrans.transforms import BOUNDARY, region_of
            if region_of(transform_of(case), x, y) == BOUNDARY:
                return
        assert density_transport_residual(case, x, y) <= 1e-12


def _quad_split(law, lo, hi):
    from scipy.integrate import quad

    def f(t):
        return dists.pdf(law, t)

    if law.family == "al":
        left, _ = quad(f, -np.inf, 0.0, epsabs=1e-12, epsrel=1e-11)
        right, _ = quad(f, 0.0, np.inf, epsabs=1e-12, epsrel=1e-11)
        return left + right
    total, _ = quad(f, lo, hi, epsabs=1e-12, epsrel=1e-11)
    return total


class TestIterateChain:
    def test_zero_steps_returns_initial_draw_only(self):
        case = TheoremCase.al(1.0, 2.0, 1.0)
        out = iterate_chain(case, steps=0, n_chains=10000, seed=710101)
        assert out.shape == (1, 10000)
        rep = ks_one_sample(out[0], _cdf_of(predicted_laws(case).x_law))
        assert rep.passed

    def test_shape_and_determinism(self):
        case = TheoremCase.sexp(1.0, 2.0, 2.0)
        a = iterate_chain(case, steps=7, n_chains=500, seed=4)
        b = iterate_chain(case, steps=7, n_chains=500, seed=4)
        assert a.shape == (8, 500)
        assert np.array_equal(a, b)
        c = iterate_chain(case, steps=7, n_chains=500, seed=5)
        assert not np.array_equal(a, c)

    def test_gig_chain_is_stationary(self):
        case = TheoremCase.gig(-0.5, 1.0, 1.0, 2.0, 1.0)
        traj = iterate_chain(case, steps=50, n_chains=10000, seed=710100)
        rep = ks_one_sample(traj[50], _cdf_of(predicted_laws(case).x_law))
        assert rep.passed, (rep.statistic, rep.threshold)

    def test_sexp_chain_is_stationary(self):
        case = TheoremCase.sexp(1.0, 2.0, 2.0)
        traj = iterate_chain(case, steps=100, n_chains=10000, seed=710100)
        rep = ks_one_sample(traj[100], _cdf_of(predicted_laws(case).x_law))
        assert rep.passed, (rep.statistic, rep.threshold)

    def test_chain_values_stay_in_support(self):
        case = TheoremCase.sexp(1.0, 2.0, 2.0)
        traj = iterate_chain(case, steps=20, n_chains=2000, seed=9)
        lo, hi = dists.support(predicted_laws(case).x_law)
        assert traj.min() >= lo and traj.max() <= hi

    def test_rejects_non_fixed_point(self):
        with pytest.raises(ValueError):
            iterate_chain(TheoremCase.al(1.0, 2.0, 3.0), steps=5, n_chains=100, seed=1)

    def test_rejects_bad_sizes(self):
        case = TheoremCase.al(1.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            iterate_chain(case, steps=-1, n_chains=100, seed=1)
        with pytest.raises(ValueError):
            iterate_chain(case, steps=5, n_chains=0, seed=1)
