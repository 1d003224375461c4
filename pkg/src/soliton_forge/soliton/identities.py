"""Identity catalog for gradient, solenoidal and constant-length fields."""

from __future__ import annotations

import numpy as np

from .. import geometry as geo
from ..errors import HypothesisUnmet
from .context import SolitonInput, SolitonPoint, context, require_dimension
from .report import DEFAULT_TOL, Checker, CheckReport, holds, magnitude
from .residuals import gradient_residual, ingredients, require_gradient


def _ctx(inp, p, order) -> SolitonPoint:
    return p if isinstance(p, SolitonPoint) else context(inp, p, order)


def is_solenoidal(ctx: SolitonPoint, tol: float) -> bool:
    scale = magnitude(ctx.on(ctx.nabla_V_j, "ud"))
    return holds(abs(float(ctx.div_V_j)), scale, tol)


def _require_riemann(inp: SolitonInput, what: str):
    if inp.kind != "riemann":
        raise HypothesisUnmet(f"{what} applies to almost Riemann solitons only")


def gradient_identity_suite(inp: SolitonInput, p, tol: float = DEFAULT_TOL, order: int = 3) -> CheckReport:
    """Bochner-type identities for gradient V and their soliton consequences."""
    require_dimension(inp)
    ctx = _ctx(inp, p, order)
    require_gradient(ctx, tol)
    n = ctx.n
    c = Checker(ctx.point, tol)
    ing = ingredients(ctx)
    V = ctx.V_j.value
    ric = ctx.ric_j.value
    ric_vv = float(V @ ric @ V)

    c.identity(
        "bochner_laplacian",
        ing["laplacian_norm_sq"],
        -2.0 * ing["nabla_v_sq"],
        -2.0 * ric_vv,
        -2.0 * ing["v_div_v"],
        values={"ric_vv": ric_vv, **ing},
    )
    div_lie = geo.divergence(ctx.frame, ctx.frame.tensor("dd", ctx.lie_g_j)).components
    div_lie_v = float(div_lie @ V)
    c.identity(
        "divergence_lie_metric",
        div_lie_v,
        -2.0 * ing["v_div_v"],
        -2.0 * ric_vv,
        values={"div_lie_v": div_lie_v},
    )

    if inp.kind != "riemann":
        return c.report
    if not ctx.has_lambda:
        for name in ("ricci_along_v", "divergence_from_lambda", "gradient_lambda"):
            c.skip(name, "no lambda supplied")
        return c.report

    lam_j = ctx.lam_j
    lam = float(lam_j)
    v_lam = float(ctx.along_V(lam_j))
    c.identity("ricci_along_v", ric_vv, 0.5 * (n - 1) * v_lam, values={"ric_vv": ric_vv, "v_lambda": v_lam})
    nsq = ing["norm_sq"]
    if np.sqrt(nsq) > 1e-12:
        c.identity(
            "divergence_from_lambda",
            ing["div_v"],
            -(n - 1) * lam,
            -0.5 * (n - 1) * v_lam / nsq,
            0.5 * (n - 2) * ing["v_norm_sq"] / nsq,
        )
    else:
        c.skip("divergence_from_lambda", "V vanishes at this point")
    grad_lam = ctx.grad(lam_j).value
    QV = ctx.Q_j.value @ V
    c.identity(
        "gradient_lambda",
        ctx.on(grad_lam, "u"),
        ctx.on(2.0 / (n - 1) * QV, "u"),
        values={"grad_lambda": grad_lam.tolist(), "q_v": QV.tolist()},
    )

    g = ctx.frame.g
    scal = float(ctx.scal_j)
    f = ctx.potential_j
    if f is not None:
        grad_f, hess, lap = geo.grad_hess_laplacian(ctx.frame, f)
        c.identity("potential_gradient", ctx.on(grad_f.components, "u"), ctx.on(-V, "u"))
        lap_f = float(lap)
        c.identity(
            "hessian_form",
            ctx.on(hess.components, "dd"),
            ctx.on(ric / (n - 2), "dd"),
            ctx.on(-((n - 1) * lam - lap_f) / (n - 2) * g, "dd"),
        )
        c.identity("hessian_trace", scal, -n * (n - 1) * lam, 2.0 * (n - 1) * lap_f, values={"laplacian_f": lap_f})

    if ctx.order < 3:
        return c.report

    d_scal = ctx.scal_j.grad().value
    d_lam = lam_j.grad().value
    d_div = ctx.div_V_j.grad().value
    c.identity(
        "scalar_curvature_differential",
        ctx.on(d_scal, "d"),
        ctx.on(-(n - 1) * n * d_lam, "d"),
        ctx.on(2.0 * (n - 1) * d_div, "d"),
    )
    if f is not None:
        d_lap = lap.jet.grad().value
        div_hess = geo.divergence(ctx.frame, hess).components
        ric_grad = ric @ grad_f.components
        c.identity(
            "divergence_hessian",
            ctx.on(div_hess, "d"),
            ctx.on(-d_lap, "d"),
            ctx.on(-ric_grad, "d"),
        )
        c.identity(
            "laplacian_differential",
            ctx.on(d_lap, "d"),
            ctx.on(-0.5 * n * d_lam, "d"),
            ctx.on(d_scal / (2.0 * (n - 1)), "d"),
        )
        c.identity(
            "laplacian_differential_ricci",
            ctx.on(d_lap, "d"),
            ctx.on(-d_lam, "d"),
            ctx.on(d_scal / (2.0 * (n - 1)), "d"),
            ctx.on((n - 2) / (n - 1) * ric_grad, "d"),
        )
    return c.report


def ric_norm_identity(inp: SolitonInput, p, tol: float = DEFAULT_TOL, order: int = 2) -> CheckReport:
    """|Ric|^2 and <L_V g, Ric> identities; unmet hypotheses become skips."""
    _require_riemann(inp, "the |Ric|^2 identities")
    require_dimension(inp)
    ctx = _ctx(inp, p, order)
    n = ctx.n
    c = Checker(ctx.point, tol)
    lam = float(ctx.lam_j)
    div = float(ctx.div_V_j)
    mu = ((n - 1) * lam - div) / (n - 2)
    lie = ctx.lie_g_j.value
    ric = ctx.ric_j.value
    pair, lie_sq = geo.norms_inner(ctx.frame, lie, ric)
    _, ric_sq = geo.norms_inner(ctx.frame, ric, ric)
    nabla_sq = float(ctx.nabla_V_norm_sq_j)
    scal = float(ctx.scal_j)
    gradient = holds(*gradient_residual(ctx), tol)
    solenoidal = is_solenoidal(ctx, tol)
    vals = {"ric_sq": ric_sq, "lie_sq": lie_sq, "nabla_v_sq": nabla_sq, "mu": mu, "div_v": div}

    if gradient:
        c.identity("lie_norm_vs_nabla", lie_sq, -4.0 * nabla_sq, values=vals)
        c.identity(
            "ric_norm",
            ric_sq,
            -(n - 2) ** 2 * n * mu**2,
            2.0 * (n - 2) ** 2 * mu * div,
            -(n - 2) ** 2 * nabla_sq,
            values=vals,
        )
    else:
        c.skip("lie_norm_vs_nabla", "V is not a gradient field")
        c.skip("ric_norm", "V is not a gradient field; see ric_norm_general")
    c.identity(
        "ric_norm_general",
        ric_sq,
        -(n - 2) ** 2 * n * mu**2,
        2.0 * (n - 2) ** 2 * mu * div,
        -0.25 * (n - 2) ** 2 * lie_sq,
        values=vals,
    )
    displayed_ricci_form = ((n - 1) * (n * (n - 1) * lam**2 - (3 * n - 2) * lam * div + 2 * div**2) - ric_sq) / (n - 2)
    c.identity(
        "lie_ricci_pairing_ricci_form",
        pair,
        -2.0 * mu * scal,
        2.0 * ric_sq / (n - 2),
        values={"pairing": pair, "half_scaled_display": displayed_ricci_form},
    )
    c.identity(
        "lie_ricci_pairing_lie_form",
        pair,
        -2.0 * (n - 2) * mu * div,
        0.5 * (n - 2) * lie_sq,
        values={"pairing": pair},
    )

    names = ("ric_norm_solenoidal", "ric_norm_solenoidal_gradient", "ric_norm_solenoidal_length")
    if not solenoidal:
        for name in names:
            c.skip(name, "V is not solenoidal")
    elif not gradient:
        for name in names:
            c.skip(name, "V is not a gradient field")
    else:
        base = n * (n - 1) ** 2 * lam**2
        c.identity(names[0], ric_sq, -base, -(n - 2) ** 2 * nabla_sq, values=vals)
        ing = ingredients(ctx)
        v_lam = float(ctx.along_V(ctx.lam_j))
        c.identity(
            names[1],
            ric_sq,
            -base,
            -0.5 * (n - 2) ** 2 * ing["laplacian_norm_sq"],
            -0.5 * (n - 2) ** 2 * (n - 1) * v_lam,
        )
        c.identity(
            names[2],
            ric_sq,
            -base,
            (n - 1) * (n - 2) ** 2 * ing["norm_sq"] * lam,
            -0.5 * (n - 2) ** 2 * ing["laplacian_norm_sq"],
            -0.5 * (n - 2) ** 3 * ing["v_norm_sq"],
        )

    nsq = ctx.norm_sq_j
    unit_res = max(abs(float(nsq) - 1.0), magnitude(ctx.on(nsq.grad().value, "d")))
    if solenoidal and gradient and unit_res <= tol:
        c.condition("unitary_ricci_flat", magnitude(ctx.on(ric, "dd")), 1.0)
    else:
        c.skip("unitary_ricci_flat", "V is not a unit solenoidal gradient field")
    return c.report


def solenoidal_suite(inp: SolitonInput, p, tol: float = DEFAULT_TOL, order: int = 2) -> CheckReport:
    """Ricci-type soliton equations induced by a solenoidal V."""
    _require_riemann(inp, "the solenoidal reformulations")
    require_dimension(inp)
    ctx = _ctx(inp, p, order)
    n = ctx.n
    c = Checker(ctx.point, tol)
    names = ("alpha_ricci_soliton", "scaled_ricci_soliton", "solenoidal_scalar_curvature")
    if not is_solenoidal(ctx, tol):
        for name in names:
            c.skip(name, "V is not solenoidal")
        return c.report
    lam = float(ctx.lam_j)
    lie, ric, g = ctx.lie_g_j.value, ctx.ric_j.value, ctx.frame.g
    c.identity(
        names[0],
        ctx.on(0.5 * lie, "dd"),
        ctx.on(ric / (n - 2), "dd"),
        ctx.on(-(n - 1) / (n - 2) * lam * g, "dd"),
        values={"alpha": 1.0 / (n - 2), "lambda_bar": (n - 1) / (n - 2) * lam},
    )
    c.identity(
        names[1],
        ctx.on(0.5 * (n - 2) * lie, "dd"),
        ctx.on(ric, "dd"),
        ctx.on(-(n - 1) * lam * g, "dd"),
        values={"lambda_bar": (n - 1) * lam},
    )
    c.identity(names[2], float(ctx.scal_j), -n * (n - 1) * lam)
    return c.report


def curvature_identity_suite(manifold, p, tol: float = DEFAULT_TOL, order: int = 3) -> CheckReport:
    """Algebraic curvature symmetries and (at order 3) contracted Bianchi."""
    frame = p if isinstance(p, geo.PointFrame) else geo.frame_at(manifold, p, order)
    c = Checker(frame.point, tol)
    Rd = frame.orthonormal(frame.riemann_lowered_jet.value, "dddd")
    c.identity("antisymmetry_first_pair", Rd, Rd.transpose(1, 0, 2, 3))
    c.identity("antisymmetry_second_pair", Rd, Rd.transpose(0, 1, 3, 2))
    c.identity("pair_symmetry", Rd, -Rd.transpose(2, 3, 0, 1))
    c.identity(
        "first_bianchi",
        Rd,
        np.einsum("jkiw->ijkw", Rd),
        np.einsum("kijw->ijkw", Rd),
    )
    ric = frame.orthonormal(frame.ricci_jet.value, "dd")
    c.identity("ricci_symmetry", ric, -ric.T)
    if frame.order >= 3:
        ric_t = frame.tensor("dd", frame.ricci_jet)
        div_ric = geo.divergence(frame, ric_t).components
        d_scal = frame.scalar_curvature_jet.grad().value
        c.identity(
            "contracted_bianchi",
            frame.orthonormal(div_ric, "d"),
            frame.orthonormal(-0.5 * d_scal, "d"),
        )
    else:
        c.skip("contracted_bianchi", "needs a frame of order 3")
    return c.report


def constant_length_ingredient(inp: SolitonInput, p, tol: float = DEFAULT_TOL, order: int = 2) -> CheckReport:
    """Pointwise ingredients of the constant-length non-existence argument.

    Runs only where V(|V|^2) and d(lambda) vanish at the point; the global
    (compact) conclusion is not asserted.
    """
    _require_riemann(inp, "the constant-length argument")
    require_dimension(inp)
    ctx = _ctx(inp, p, order)
    n = ctx.n
    c = Checker(ctx.point, tol)
    names = ("constant_length_ricci", "constant_length_bochner", "constant_length_lambda")
    if not holds(*gradient_residual(ctx), tol):
        for name in names:
            c.skip(name, "V is not a gradient field")
        return c.report
    ing = ingredients(ctx)
    d_nsq = magnitude(ctx.on(ctx.norm_sq_j.grad().value, "d"))
    d_lam = magnitude(ctx.on(ctx.lam_j.grad().value, "d"))
    if d_nsq > tol or d_lam > tol:
        reason = "|V| is not constant" if d_nsq > tol else "lambda is not constant"
        for name in names:
            c.skip(name, reason)
        return c.report
    V = ctx.V_j.value
    c.condition(names[0], abs(float(V @ ctx.ric_j.value @ V)), 1.0)
    c.identity(names[1], ing["nabla_v_sq"], ing["v_div_v"])
    c.identity(names[2], float(ctx.lam_j), -ing["div_v"] / (n - 1))
    return c.report
