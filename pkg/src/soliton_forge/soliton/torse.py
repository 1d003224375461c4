"""Torse-forming potential fields: decomposition and the derived identities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .. import geometry as geo
from ..errors import HypothesisUnmet, NotConcircular, NotTorseForming, OrderError
from .context import SolitonInput, SolitonPoint, context, require_dimension
from .report import DEFAULT_TOL, Checker, CheckReport, holds, magnitude
from .residuals import riemann_terms


@dataclass
class TorseFormingData:
    """``nabla V = a I + psi (x) V`` at one point (coordinate components)."""

    a: float
    psi: np.ndarray
    zeta: np.ndarray
    theta: np.ndarray
    residual: float

    def psi_of(self, v) -> float:
        return float(self.psi @ np.asarray(v, dtype=float))


def torse_forming_decomposition(ctx: SolitonPoint, row_order: Optional[Sequence[int]] = None) -> TorseFormingData:
    """Least-squares (a, psi) from the n^2 x (n+1) system in an orthonormal frame.

    ``row_order`` permutes the equations before solving; the solution does
    not depend on it when V is non-zero.
    """
    ctx.require_nonzero()
    n = ctx.n
    L = ctx.frame.cholesky
    M = ctx.on(ctx.nabla_V_j, "ud")
    v = L.T @ ctx.V_j.value
    A = np.zeros((n * n, n + 1))
    for i in range(n):
        for j in range(n):
            r = i * n + j
            A[r, 0] = 1.0 if i == j else 0.0
            A[r, 1 + j] = v[i]
    b = M.reshape(-1)
    if row_order is not None:
        idx = np.asarray(row_order)
        A, b = A[idx], b[idx]
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    a, psi_hat = float(x[0]), x[1:]
    residual = magnitude(M - a * np.eye(n) - np.outer(v, psi_hat))
    psi = L @ psi_hat
    zeta = ctx.frame.g_inv @ psi
    theta = ctx.frame.g @ ctx.V_j.value
    return TorseFormingData(a, psi, zeta, theta, residual)


def is_torse_forming(ctx: SolitonPoint, tol: float) -> bool:
    return ctx.torse_holds(tol)[0]


def is_concircular(ctx: SolitonPoint, tol: float) -> bool:
    if not is_torse_forming(ctx, tol):
        return False
    scale = magnitude(ctx.on(ctx.nabla_V_j, "ud"))
    return holds(magnitude(ctx.on(ctx.psi_j, "d")), scale, tol)


def _require_torse(ctx: SolitonPoint, tol: float):
    ctx.require_nonzero()
    ok, r = ctx.torse_holds(tol)
    if not ok:
        raise NotTorseForming(f"V is not torse-forming at {ctx.point} (residual {r:.3g})")


def _require_riemann(inp: SolitonInput, what: str):
    if inp.kind != "riemann":
        raise HypothesisUnmet(f"{what} applies to almost Riemann solitons only")


def _ctx(inp, p, order) -> SolitonPoint:
    return p if isinstance(p, SolitonPoint) else context(inp, p, order)


class _Fields:
    """Numeric values of the torse-forming quantities at a point."""

    def __init__(self, ctx: SolitonPoint):
        self.n = ctx.n
        self.g = ctx.frame.g
        self.V = ctx.V_j.value
        self.theta = ctx.theta_j.value
        self.nsq = float(ctx.norm_sq_j)
        self.a = float(ctx.a_j)
        self.psi = ctx.psi_j.value
        self.zeta = ctx.zeta_j.value
        self.psi_v = float(self.psi @ self.V)
        self.da = ctx.a_j.grad().value
        self.v_a = float(self.da @ self.V)
        self.ric = ctx.ric_j.value
        self.R = ctx.R_j.value


def torse_forming_suite(inp: SolitonInput, p, tol: float = DEFAULT_TOL, order: int = 3) -> CheckReport:
    _require_riemann(inp, "the torse-forming suite")
    require_dimension(inp)
    ctx = _ctx(inp, p, order)
    _require_torse(ctx, tol)
    F = _Fields(ctx)
    n, g, V, th, psi = F.n, F.g, F.V, F.theta, F.psi
    lam = float(ctx.lam_j)
    mu = lam - 2.0 * F.a
    eye = np.eye(n)
    c = Checker(ctx.point, tol)
    sym = np.outer(psi, th) + np.outer(th, psi)

    c.identity(
        "torse_lie_metric",
        ctx.on(ctx.lie_g_j.value, "dd"),
        ctx.on(-2.0 * F.a * g, "dd"),
        ctx.on(-sym, "dd"),
        values={"a": F.a, "psi_v": F.psi_v},
    )
    c.identity("torse_divergence", float(ctx.div_V_j), -n * F.a, -F.psi_v)
    coef = (n - 1) * mu - F.psi_v
    c.identity(
        "torse_ricci",
        ctx.on(F.ric, "dd"),
        ctx.on(-coef * g, "dd"),
        ctx.on(0.5 * (n - 2) * sym, "dd"),
    )
    Q = ctx.Q_j.value
    c.identity(
        "torse_ricci_operator",
        ctx.on(Q, "ud"),
        ctx.on(-coef * eye, "ud"),
        ctx.on(0.5 * (n - 2) * (np.outer(V, psi) + np.outer(F.zeta, th)), "ud"),
    )
    c.identity("torse_scalar_curvature", float(ctx.scal_j), -(n - 1) * (n * mu - 2.0 * F.psi_v))

    nabla_psi = ctx.nabla_psi_j.value  # [j, i] = (nabla_i psi)_j
    codazzi_res = magnitude(ctx.on(nabla_psi - nabla_psi.T, "dd"))
    codazzi = holds(codazzi_res, magnitude(ctx.on(nabla_psi, "dd")), tol)
    ric_vv = float(V @ F.ric @ V)

    RV = np.einsum("lijk,k->lij", F.R, V)
    J = F.da - F.a * psi
    curl = nabla_psi - nabla_psi.T  # [j, i] = (nabla_i psi)_j - (nabla_j psi)_i
    c.identity(
        "curvature_on_v",
        ctx.on(RV, "udd"),
        ctx.on(-np.einsum("i,lj->lij", J, eye), "udd"),
        ctx.on(np.einsum("j,li->lij", J, eye), "udd"),
        ctx.on(-np.einsum("ji,l->lij", curl, V), "udd"),
        values={"curvature_on_v": ctx.on(RV, "udd").tolist()},
    )
    c.identity(
        "ricci_along_v_soliton",
        ric_vv,
        -(n - 1) * (mu - F.psi_v) * F.nsq,
        values={"ric_vv": ric_vv},
    )
    if codazzi:
        jac = np.einsum("likm,k,m->li", F.R, V, V)  # R(d_i, V)V
        c.identity(
            "jacobi_operator",
            ctx.on(jac, "ud"),
            ctx.on(-np.outer(V, F.da), "ud"),
            ctx.on(F.v_a * eye, "ud"),
            ctx.on(F.a * (np.outer(V, psi) - F.psi_v * eye), "ud"),
            values={"jacobi": ctx.on(jac, "ud").tolist(), "v_a": F.v_a},
        )
        c.identity("ricci_along_v_jacobi", ric_vv, (n - 1) * (F.v_a - F.a * F.psi_v))
        lam_p = 2.0 * F.a + ((F.a + F.nsq) * F.psi_v - F.v_a) / F.nsq
        c.identity("lambda_torse_forming", lam, -lam_p, values={"lambda_torse_forming": lam_p, "lambda": lam})
    else:
        for name in ("jacobi_operator", "ricci_along_v_jacobi", "lambda_torse_forming"):
            c.skip(name, f"psi is not a Codazzi tensor (residual {codazzi_res:.3g})")

    psi_small = holds(magnitude(ctx.on(psi, "d")), magnitude(ctx.on(ctx.nabla_V_j, "ud")), tol)
    da_small = holds(magnitude(ctx.on(F.da, "d")), abs(F.a), tol)
    if psi_small and da_small:
        vals = {"a": F.a, "a_nonzero": abs(F.a) > tol}
        c.identity("concircular_constant_lambda", lam, -2.0 * F.a, values=vals)
        c.condition("concircular_constant_ricci_flat", magnitude(ctx.on(F.ric, "dd")), 1.0, values=vals)
    else:
        for name in ("concircular_constant_lambda", "concircular_constant_ricci_flat"):
            c.skip(name, "V is not concircular with constant a")

    if ctx.order >= 3:
        nric = geo.nabla_ricci(ctx.frame).components  # [x, y, z]
        d_lam = ctx.lam_j.grad().value
        d_psi_v = ctx.psi_of_V_j.grad().value
        nabla_theta = geo.covariant_derivative(ctx.frame, ctx.frame.tensor("d", ctx.theta_j)).components
        # (nabla_X theta)Z = nabla_theta[z, x]
        scalar_part = (n - 1) * (d_lam - 2.0 * F.da) - d_psi_v
        bracket = (
            np.einsum("y,zx->xyz", psi, nabla_theta)
            + np.einsum("z,yx->xyz", psi, nabla_theta)
            + np.einsum("y,zx->xyz", th, nabla_psi)
            + np.einsum("z,yx->xyz", th, nabla_psi)
        )
        c.identity(
            "nabla_ricci_torse",
            ctx.on(nric, "ddd"),
            ctx.on(-np.einsum("x,yz->xyz", scalar_part, g), "ddd"),
            ctx.on(0.5 * (n - 2) * bracket, "ddd"),
        )
    return c.report


def nabla_ric_conditions(inp: SolitonInput, p, tol: float = DEFAULT_TOL, order: int = 3) -> CheckReport:
    """Ricci symmetry, recurrence, Codazzi and cyclic conditions for concircular V."""
    _require_riemann(inp, "the nabla Ric conditions")
    ctx = _ctx(inp, p, order)
    if ctx.order < 3:
        raise OrderError("nabla Ric conditions need a frame of order 3")
    ctx.require_nonzero()
    if not is_concircular(ctx, tol):
        raise NotConcircular(f"V is not concircular at {ctx.point}")
    n = ctx.n
    c = Checker(ctx.point, tol)
    V = ctx.V_j.value
    th = ctx.theta_j.value
    nsq = float(ctx.norm_sq_j)
    ric = ctx.ric_j.value
    ric_scale = magnitude(ctx.on(ric, "dd"))
    nric = geo.nabla_ricci(ctx.frame).components
    mu_j = ctx.lam_j - ctx.a_j * 2.0
    mu = float(mu_j)
    dmu = mu_j.grad().value
    d_lam = ctx.lam_j.grad().value
    d_a2 = 2.0 * ctx.a_j.grad().value
    grad_mu = ctx.frame.g_inv @ dmu
    v_mu = float(dmu @ V)
    dmu_scale = max(magnitude(ctx.on(d_lam, "d")), magnitude(ctx.on(d_a2, "d")))
    eye = np.eye(n)
    vals = {"mu": mu, "d_mu": magnitude(ctx.on(dmu, "d")), "nabla_ricci": magnitude(ctx.on(nric, "ddd"))}

    c.equivalence(
        "ricci_symmetric",
        (magnitude(ctx.on(nric, "ddd")), ric_scale),
        (magnitude(ctx.on(dmu, "d")), dmu_scale),
        values=vals,
    )
    rec = nric - np.einsum("x,yz->xyz", th, ric)
    rhs = grad_mu - mu * V
    c.equivalence(
        "ricci_recurrent",
        (magnitude(ctx.on(rec, "ddd")), ric_scale),
        (magnitude(ctx.on(rhs, "u")), max(dmu_scale, magnitude(ctx.on(mu * V, "u")))),
    )
    cod = nric - nric.transpose(1, 0, 2)
    form = np.einsum("x,ly->lxy", dmu, eye) - np.einsum("y,lx->lxy", dmu, eye)
    c.equivalence(
        "ricci_codazzi",
        (magnitude(ctx.on(cod, "ddd")), ric_scale),
        (magnitude(ctx.on(form, "udd")), dmu_scale),
    )
    cyc = nric + nric.transpose(1, 2, 0) + nric.transpose(2, 0, 1)
    rhs4 = grad_mu + 2.0 * v_mu * V / nsq
    c.equivalence(
        "ricci_cyclic",
        (magnitude(ctx.on(cyc, "ddd")), ric_scale),
        (magnitude(ctx.on(rhs4, "u")), dmu_scale),
        implication=True,
    )
    return c.report


def jacobi_condition(inp: SolitonInput, p, tol: float = DEFAULT_TOL, order: int = 2) -> CheckReport:
    """Curvature of a torse-forming soliton and the R(V,.).Ric = 0 branches."""
    _require_riemann(inp, "the R(V,.).Ric condition")
    require_dimension(inp)
    ctx = _ctx(inp, p, order)
    _require_torse(ctx, tol)
    F = _Fields(ctx)
    n, g, V, th, psi, zeta = F.n, F.g, F.V, F.theta, F.psi, F.zeta
    lam = float(ctx.lam_j)
    mu = lam - 2.0 * F.a
    eye = np.eye(n)
    c = Checker(ctx.point, tol)

    # 2 R^l_ijk for X = d_i, Y = d_j, Z = d_k
    A_j = 2.0 * mu * g - np.outer(psi, th) - np.outer(th, psi)  # [j, k]
    general = [
        2.0 * F.R,
        -np.einsum("jk,li->lijk", A_j, eye),
        np.einsum("ik,lj->lijk", A_j, eye),
        np.einsum("jk,i,l->lijk", g, psi, V) - np.einsum("ik,j,l->lijk", g, psi, V),
        np.einsum("jk,i,l->lijk", g, th, zeta) - np.einsum("ik,j,l->lijk", g, th, zeta),
    ]
    c.identity("torse_curvature", *[ctx.on(t, "uddd") for t in general])

    RV2 = 2.0 * np.einsum("i,lijk->ljk", V, F.R)
    k = 2.0 * mu - F.psi_v
    eq8 = [
        RV2,
        -k * (np.einsum("jk,l->ljk", g, V) - np.einsum("k,lj->ljk", th, eye)),
        np.einsum("k,j,l->ljk", psi, th, V) - F.nsq * np.einsum("k,lj->ljk", psi, eye),
        np.einsum("jk,l->ljk", F.nsq * g - np.outer(th, th), zeta),
    ]
    c.identity("torse_curvature_along_v", *[ctx.on(t, "udd") for t in eq8])

    h = 0.5 * float(ctx.along_V(ctx.norm_sq_j)) / F.nsq
    c.identity("psi_of_v", F.psi_v, -h, F.a, values={"psi_v": F.psi_v, "h": h})

    RVx = np.einsum("i,lijk->ljk", V, F.R)  # R(V, d_j) d_k
    part1 = np.einsum("lxy,lz->xyz", RVx, F.ric)
    part2 = np.einsum("yl,lxz->xyz", F.ric, RVx)
    D = geo.curvature_derivation_on_ric(ctx.frame, ctx.V_j).components
    d_res = magnitude(ctx.on(D, "ddd"))
    d_scale = max(magnitude(ctx.on(part1, "ddd")), magnitude(ctx.on(part2, "ddd")))
    c.condition("ricci_semisymmetric_along_v", d_res, d_scale, values={"derivation": d_res})
    if holds(d_res, d_scale, tol):
        norm_v = np.sqrt(F.nsq)
        norm_zeta = float(np.sqrt(max(zeta @ g @ zeta, 0.0)))
        s = float(norm_v * norm_zeta)
        branches = {
            "branch_a": float(lam - h - F.a),
            "branch_b_plus": F.a - h - s,
            "branch_b_minus": F.a - h + s,
        }
        scale = max(abs(lam), abs(h), abs(F.a), s)
        vals = dict(branches)
        for key, val in branches.items():
            vals[key + "_holds"] = bool(holds(abs(val), scale, tol))
        best = min(abs(v) for v in branches.values())
        c.condition("semisymmetric_branches", best, scale, values=vals)
    else:
        c.skip("semisymmetric_branches", "R(V,.).Ric does not vanish here")
    return c.report


def conharmonic_criterion(inp: SolitonInput, p, tol: float = DEFAULT_TOL, order: int = 3) -> CheckReport:
    """Observational check of the conharmonic criterion for (V, 2 lambda)."""
    if inp.kind != "ricci":
        raise HypothesisUnmet("the conharmonic criterion applies to almost Ricci solitons only")
    require_dimension(inp)
    ctx = _ctx(inp, p, order)
    n = ctx.n
    c = Checker(ctx.point, tol)
    _, H = geo.weyl_conharmonic(ctx.frame)
    H_on = ctx.on(H.components, "uddd")
    R_on = ctx.on(ctx.R_j.value, "uddd") * ((n - 3) / (n - 2))
    lhs = (magnitude(H_on - R_on), max(magnitude(H_on), magnitude(R_on)))
    terms = riemann_terms(ctx, lam_factor=2.0)
    eq3 = (magnitude(sum(terms)), max(magnitude(t) for t in terms))
    c.equivalence(
        "conharmonic_criterion",
        lhs,
        eq3,
        values={
            "conharmonic_slot": float(H_on[0, 0, 1, 1]),
            "scaled_curvature_slot": float(R_on[0, 0, 1, 1]),
            "doubled_lambda_riemann_residual": eq3[0],
        },
    )

    names = ("concircular_curvature_form", "concircular_covector", "concircular_gradient_a", "concircular_scalar")
    if float(ctx.norm_sq_j) <= 1e-24 or not is_concircular(ctx, tol):
        for name in names:
            c.skip(name, "V is not concircular")
        return c.report
    lam = float(ctx.lam_j)
    a = float(ctx.a_j)
    g = ctx.frame.g
    V = ctx.V_j.value
    th = ctx.theta_j.value
    nsq = float(ctx.norm_sq_j)
    eye = np.eye(n)
    form = 2.0 * (lam - a) * (np.einsum("jk,li->lijk", g, eye) - np.einsum("ik,lj->lijk", g, eye))
    form_on = ctx.on(form, "uddd")
    R_full = ctx.on(ctx.R_j.value, "uddd")
    c.equivalence(
        names[0],
        (magnitude(R_full - form_on), max(magnitude(R_full), magnitude(form_on))),
        eq3,
    )
    da = ctx.a_j.grad().value
    v_a = float(da @ V)
    cov = [ctx.on(v_a * th, "d"), ctx.on(-nsq * da, "d")]
    c.equivalence(
        names[1],
        eq3,
        (magnitude(sum(cov)), max(magnitude(t) for t in cov)),
        implication=True,
        values={"v_a": v_a},
    )
    grad_a = ctx.frame.g_inv @ da
    ga = [ctx.on(grad_a, "u"), ctx.on(-v_a * V / nsq, "u")]
    c.equivalence(names[2], eq3, (magnitude(sum(ga)), max(magnitude(t) for t in ga)), implication=True)
    scal = float(ctx.scal_j)
    if ctx.order >= 3:
        d_scal = magnitude(ctx.on(ctx.scal_j.grad().value, "d"))
        c.equivalence(
            names[3],
            eq3,
            (d_scal, max(1.0, abs(scal))),
            implication=True,
            values={"scal": scal},
        )
    else:
        c.skip(names[3], "needs a frame of order 3")
    return c.report


def scalar_curvature_spread(values) -> float:
    """max - min of scalar curvature samples."""
    v = np.asarray(list(values), dtype=float)
    return float(v.max() - v.min()) if v.size else 0.0
