import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from se2curves.compare import (
    Verdict,
    compare_curves,
    compare_pair,
    elastica_curvature_bound,
    hausdorff_distance,
    planar_interpolant,
    resample_common,
)
from se2curves.dynamics import ExtremalState, ModelParams, SystemKind
from se2curves.errors import BadParam, EmptyOverlap
from se2curves.integrate import IntegratorConfig, integrate_ivp, reparametrize_by_spatial_arclength

from conftest import REFERENCE_TARGETS

E = ExtremalState.at_identity
XI1 = ModelParams(1.0)


def elastica(p, length):
    return integrate_ivp(SystemKind.ELASTICA_S, E(*p), XI1, IntegratorConfig(max_param=length))


def test_identical_straight_segments():
    a = elastica((1, 0, 0), 2.0)
    paired = resample_common(a, a)
    assert np.all(paired.deviation == 0.0)
    assert paired.s[0] == 0.0 and paired.s[-1] == 2.0


def test_common_grid_is_the_intersection():
    paired = resample_common(elastica((1, 0, 0), 2.0), elastica((0.3, 0.1, 0.5), 3.0))
    assert paired.s[0] == 0.0 and paired.s[-1] == 2.0
    assert np.max(np.diff(paired.s)) <= 1e-2 + 1e-15
    fine = resample_common(elastica((1, 0, 0), 2.0), elastica((0, 0, 1), 3.0), step=3e-3)
    assert np.max(np.diff(fine.s)) <= 3e-3 + 1e-15


def test_disjoint_domains():
    back = integrate_ivp(SystemKind.ELASTICA_S, E(0, 0, 1), XI1, IntegratorConfig(max_param=-1.0))
    with pytest.raises(EmptyOverlap):
        resample_common(back, elastica((0, 0, 1), 1.0))


def test_time_parametrized_input_rejected():
    t_traj = integrate_ivp(SystemKind.GEODESIC_T, E(1, 0, 0), XI1, IntegratorConfig(max_param=1.0))
    with pytest.raises(BadParam):
        planar_interpolant(t_traj)


def test_circle_interpolation_against_closed_form():
    circle = elastica((0, 0, 1), 2 * math.pi)
    s = np.linspace(0, 2 * math.pi, 6001)
    xy = planar_interpolant(circle)(s)
    assert np.max(np.hypot(xy[:, 0] - np.sin(s), xy[:, 1] - (1 - np.cos(s)))) <= 1e-6
    paired = resample_common(circle, circle, step=1e-3)
    ref = np.column_stack([np.sin(paired.s), 1 - np.cos(paired.s)])
    assert np.max(np.abs(paired.first - ref)) <= 1e-6


@given(arrays(float, (12, 2), elements=st.floats(-10, 10)), arrays(float, (9, 2), elements=st.floats(-10, 10)))
def test_hausdorff_symmetric(a, b):
    assert abs(hausdorff_distance(a, b) - hausdorff_distance(b, a)) <= 1e-12
    assert hausdorff_distance(a, a) == 0.0


@given(st.tuples(*[st.floats(-1, 1)] * 3), st.tuples(*[st.floats(-1, 1)] * 3))
def test_hausdorff_below_pointwise_deviation(p, q):
    rep = compare_curves(elastica(p, 1.5), elastica(q, 1.5))
    assert 0.0 <= rep.hausdorff_distance <= rep.max_pointwise_deviation + 1e-15


def test_self_comparison_is_zero_but_curved_is_distinct():
    curved = elastica((0.2, 0.3, 0.95), 4.0)
    rep = compare_curves(curved, curved)
    assert rep.max_pointwise_deviation == 0.0 and rep.hausdorff_distance == 0.0
    # coincidence alone is not enough: the curves must also be straight
    assert rep.verdict is Verdict.DISTINCT


def test_straight_pair_coincides(pairs):
    ela, geo = pairs.get((2.0, 0.0, 0.0))
    rep = compare_pair(ela, geo)
    assert rep.max_pointwise_deviation < 1e-8
    assert rep.max_abs_curvature_elastica < 1e-8 and rep.max_abs_curvature_geodesic < 1e-8
    assert rep.verdict is Verdict.COINCIDE_STRAIGHT_LINE


def test_straight_geodesic_against_straight_elastica_directly():
    geo = integrate_ivp(SystemKind.GEODESIC_T, E(1, 0, 0), XI1, IntegratorConfig(max_param=3.0))
    rep = compare_curves(elastica((-2, 0, 0), 3.0), reparametrize_by_spatial_arclength(geo))
    assert rep.verdict is Verdict.COINCIDE_STRAIGHT_LINE


@pytest.mark.parametrize("target", REFERENCE_TARGETS)
def test_reference_pairs_are_distinct(pairs, target):
    ela, geo = pairs.get(target)
    rep = compare_pair(ela, geo)
    assert rep.verdict is Verdict.DISTINCT
    assert rep.max_pointwise_deviation > 1e-4
    assert rep.max_abs_curvature_elastica > 1e-4
    # elastica curvature is bounded by its first integrals
    assert rep.max_abs_curvature_elastica <= elastica_curvature_bound(ela.trajectory) + 1e-9
    assert np.all(np.isfinite(rep.curvature_profiles["elastica"][1]))


def test_geodesic_curvature_grows_toward_cusp_end(pairs):
    # the (0, 1, -pi) minimizer ends on a cusp
    ela, geo = pairs.get(REFERENCE_TARGETS[0])
    rep = compare_pair(ela, geo)
    s, k = rep.curvature_profiles["geodesic"]
    tail = np.abs(k[-6:-1])
    assert np.all(np.diff(tail) > 0)
    assert np.abs(k[-1]) > 10 * rep.elastica_curvature_bound
    assert rep.max_abs_curvature_elastica <= rep.elastica_curvature_bound + 1e-9


def test_curvature_bound_formula():
    traj = elastica((0.5, -0.2, 1.1), 5.0)
    h = traj.hamiltonians[0]
    H = h[0] + (h[1] ** 2 - 1) / 2
    expected = math.sqrt(2 * (H + math.hypot(h[0], h[2])) + 1)
    assert elastica_curvature_bound(traj) == pytest.approx(expected, rel=1e-12)
    assert np.max(np.abs(traj.curvature)) <= expected
