"""Acceptance criteria 1-11; a per-criterion PASS/FAIL line is printed in the summary."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import settings, given
from hypothesis import strategies as st

from helpers import EUCLID, analytic_metrics, potentials, random_gradient_input
from soliton_forge import geometry as geo
from soliton_forge.cli import load_spec, shipped_specs
from soliton_forge.geometry import ChartManifold
from soliton_forge.sampling import sample_points
from soliton_forge.soliton import (
    classify_vector_field,
    conharmonic_criterion,
    gradient_identity_suite,
    nabla_ric_conditions,
    recover_lambda_ricci,
    recover_lambda_riemann,
    residual_ricci,
    residual_riemann,
    ric_norm_identity,
    soliton_residual_suite,
    torse_forming_suite,
)
from soliton_forge.soliton.context import context
from soliton_forge.soliton.identities import curvature_identity_suite
from test_geometry import XYZ, _rel_err, kn_loops, oracle_christoffel, oracle_nabla_ricci, oracle_ricci, oracle_riemann
from test_geometry import random_polynomial_metric

crit = pytest.mark.criterion


def example(name):
    spec = load_spec(name)
    pts = sample_points(spec.input, spec.box, spec.sampling["count"], spec.sampling["seed"]).points
    assert len(pts) == spec.sampling["count"]
    return spec.input, pts


EX1, EX1_PTS = example("hyperbolic-half-space.json")
EX2, EX2_PTS = example("horospherical.json")
EX3, EX3_PTS = example("hyperbolic-half-space-ricci.json")
EX4, EX4_PTS = example("horospherical-ricci.json")


def rel_close(got, ref, rel):
    return abs(got - ref) <= rel * max(1.0, abs(ref))


def ingredients_match(rec, expected, rel=1e-9):
    got = list(rec.ingredients.values())
    return all(abs(a - b) <= rel * abs(b) for a, b in zip(got, expected))


# -- 1, 2, 3: worked examples -------------------------------------------------------------


@crit(1)
def test_example1_reproduction():
    assert all(0.5 <= p[2] <= 3 for p in EX1_PTS)
    for p in EX1_PTS:
        z = p[2]
        rec = recover_lambda_riemann(EX1, p)
        expected = [1 / z**2, -2 / z**3, 8 / z**2, 3 / z**2, -3 / z, 3 / z**2]
        assert ingredients_match(rec, expected), (p, rec.ingredients)
        assert rel_close(rec.value, -2 / z - 1, 1e-8)


@crit(2)
def test_example2_reproduction():
    for p in [*EX2_PTS, (0.0, 0.0, 0.0)]:
        z = p[2]
        rec = recover_lambda_riemann(EX2, p)
        e = math.exp(z)
        expected = [e**2, 2 * e**3, 8 * e**2, 3 * e**2, 3 * e, 3 * e**2]
        assert ingredients_match(rec, expected), (p, rec.ingredients)
        assert rel_close(rec.value, 2 * e - 1, 1e-8)


@crit(3)
@pytest.mark.parametrize("which", ["example3", "example4"])
def test_examples_3_4_reproduction(which):
    inp, pts, lam = {
        "example3": (EX3, EX3_PTS, lambda z: -1 / z - 2),
        "example4": (EX4, EX4_PTS, lambda z: math.exp(z) - 2),
    }[which]
    for p in pts:
        assert rel_close(recover_lambda_ricci(inp, p).value, lam(p[2]), 1e-8)
        assert residual_ricci(inp, p) < 1e-8


# -- 4: residuals ---------------------------------------------------------------------------


@crit(4)
@pytest.mark.parametrize("which", ["example1", "example2"])
def test_soliton_residuals(which):
    inp, pts, shifted = {
        "example1": (EX1, EX1_PTS, "-2/z - 1 + 0.1"),
        "example2": (EX2, EX2_PTS, "2*exp(z) - 1 + 0.1"),
    }[which]
    bad = inp.with_lambda(shifted)
    for p in pts:
        assert residual_riemann(inp, p) < 1e-8
        assert residual_riemann(bad, p) > 0.1 - 1e-12


# -- 5: identity catalog ----------------------------------------------------------------------

CATALOG = [
    "bochner_laplacian",
    "divergence_lie_metric",
    "ricci_along_v",
    "divergence_from_lambda",
    "gradient_lambda",
]


@crit(5)
@pytest.mark.parametrize("which", ["example1", "example2"])
def test_identity_catalog_on_examples(which):
    inp, pts = {"example1": (EX1, EX1_PTS), "example2": (EX2, EX2_PTS)}[which]
    for p in pts:
        grad = gradient_identity_suite(inp, p, 1e-8)
        for name in CATALOG:
            assert grad[name].residual < 1e-8, (name, p, grad[name].residual)
        assert soliton_residual_suite(inp, p, 1e-8)["contracted_ricci_form"].residual < 1e-8
        assert ric_norm_identity(inp, p, 1e-8)["ric_norm_general"].residual < 1e-8


@crit(5)
@settings(max_examples=50, deadline=None, database=None)
@given(analytic_metrics(), potentials(), st.tuples(*[st.floats(-0.3, 0.3)] * 3))
def test_identity_catalog_random_gradient_fields(metric, fd, p):
    rep = gradient_identity_suite(random_gradient_input(metric, *fd), p, 1e-7)
    assert rep["bochner_laplacian"].passed and rep["divergence_lie_metric"].passed


# -- 6: classification ------------------------------------------------------------------------


@crit(6)
@pytest.mark.parametrize("which", ["example1", "example2"])
def test_classification(which):
    inp, pts, a = {
        "example1": (EX1, EX1_PTS, lambda z: -1 / z),
        "example2": (EX2, EX2_PTS, math.exp),
    }[which]
    cls = classify_vector_field(inp, pts)
    assert cls.is_gradient.holds and cls.is_concircular.holds
    for got, p in zip(cls.a_values, pts):
        assert rel_close(got, a(p[2]), 1e-9)
    assert cls.gradient_form_check.residual < 1e-9
    assert cls.divergence_check.residual < 1e-9


# -- 7: torse-forming ---------------------------------------------------------------------------


@crit(7)
@pytest.mark.parametrize("which", ["example1", "example2"])
def test_torse_forming_lambda_and_ricci(which):
    inp, pts = {"example1": (EX1, EX1_PTS), "example2": (EX2, EX2_PTS)}[which]
    for p in pts:
        rep = torse_forming_suite(inp, p, 1e-8)
        v = rep["lambda_torse_forming"].values
        assert rel_close(v["lambda_torse_forming"], v["lambda"], 1e-8)
        assert rep["torse_ricci"].residual < 1e-8
        assert rep.passed


@crit(7)
def test_jacobi_and_curvature_displays_example2():
    rep = torse_forming_suite(EX2, (0.0, 0.0, 0.0), 1e-8)
    assert rep["jacobi_operator"].passed and rep["curvature_on_v"].passed
    assert rep["jacobi_operator"].values["v_a"] == pytest.approx(1, abs=1e-12)
    for z in (0.0, 0.5):
        e = math.exp(z)
        R = context(EX2, (0.0, 0.0, z)).frame.riemann_jet.value
        V = np.array([0.0, 0.0, e])
        # R(d_x, V)V = -e^{2z} d_x and R(d_x, d_z)V = -e^z d_x in coordinates
        jac = np.einsum("lijk,j,k->li", R, V, V)[:, 0]
        assert jac == pytest.approx([-(e**2), 0, 0], abs=1e-12)
        rxz = np.einsum("lk,k->l", R[:, 0, 2, :], V)
        assert rxz == pytest.approx([-e, 0, 0], abs=1e-12)


# -- 8: conharmonic criterion ---------------------------------------------------------------------


@crit(8)
def test_conharmonic_euclidean():
    r = conharmonic_criterion(EUCLID.with_kind("ricci"), (0.0, 0.0, 0.0))["conharmonic_criterion"]
    assert r.values["lhs_holds"] and r.values["rhs_holds"]


@crit(8)
def test_conharmonic_example4():
    r = conharmonic_criterion(EX4, (0.0, 0.0, 0.0))["conharmonic_criterion"]
    assert not r.values["lhs_holds"] and not r.values["rhs_holds"]
    assert r.values["conharmonic_slot"] == pytest.approx(3, abs=1e-12)
    assert r.values["scaled_curvature_slot"] == pytest.approx(0, abs=1e-12)
    assert r.values["doubled_lambda_riemann_residual"] >= 1
    assert r.passed


# -- 9: nabla Ric --------------------------------------------------------------------------------


@crit(9)
@pytest.mark.parametrize("which", ["example1", "example2"])
def test_nabla_ricci_proposition(which):
    inp, pts = {"example1": (EX1, EX1_PTS), "example2": (EX2, EX2_PTS)}[which]
    for p in pts:
        v = nabla_ric_conditions(inp, p, 1e-8)["ricci_symmetric"].values
        assert v["d_mu"] < 1e-8 and v["nabla_ricci"] < 1e-8
        assert v["lhs_holds"] and v["rhs_holds"]


# -- 10: oracles ----------------------------------------------------------------------------------


@crit(10)
def test_finite_difference_oracles():
    coef, texts = random_polynomial_metric(23)
    x = [mpmath.mpf("-0.09"), mpmath.mpf("0.15"), mpmath.mpf("0.04")]
    f = geo.frame_at(ChartManifold.from_strings(XYZ, texts), [float(v) for v in x], 3)
    assert _rel_err(f.gamma, oracle_christoffel(coef, x)) < 1e-5
    assert _rel_err(f.riemann_jet.value, oracle_riemann(coef, x)) < 1e-5
    assert _rel_err(f.ricci_jet.value, oracle_ricci(coef, x)) < 1e-5
    assert _rel_err(geo.nabla_ricci(f).components, oracle_nabla_ricci(coef, x)) < 1e-5


@crit(10)
def test_kulkarni_nomizu_oracle():
    rng = np.random.default_rng(17)
    for n in (3, 4):
        a, b = rng.normal(size=(2, n, n))
        a, b = a + a.T, b + b.T
        ref = kn_loops(a, b)
        assert np.max(np.abs(geo.kulkarni_nomizu(a, b) - ref)) <= 1e-12 * max(1, np.max(np.abs(ref)))


# -- 11: curvature symmetries ---------------------------------------------------------------------


@crit(11)
@pytest.mark.parametrize("name", shipped_specs())
def test_curvature_symmetry_suite(name):
    spec = load_spec(name)
    pts = sample_points(spec.input, spec.box, spec.sampling["count"], spec.sampling["seed"]).points
    for p in pts:
        rep = curvature_identity_suite(spec.input.manifold, p, 1e-8)
        assert rep.names()[:4] == ["antisymmetry_first_pair", "antisymmetry_second_pair", "pair_symmetry", "first_bianchi"]
        assert "contracted_bianchi" in rep.names()
        for r in rep:
            assert r.residual < 1e-8, (name, p, r.name, r.residual)
