"""Riemannian geometry at a chart point.

Every field is carried as a :class:`~soliton_forge.jet.Jet` so that its
derivatives are available exactly.  The metric is expanded to order ``K``;
Christoffel symbols then have order ``K-1``, curvature ``K-2`` and the
covariant derivative of Ricci ``K-3``.

Conventions (normative for the whole package):

* ``R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``,
  stored as ``R[l,i,j,k] = R^l_{ijk}`` with ``R(d_i,d_j)d_k = R^l_{ijk} d_l``;
* lowered ``R(X,Y,Z,W) = g(R(X,Y)Z, W)``, stored as ``Rd[i,j,k,w]``;
* ``Ric(Y,Z) = trace(X -> R(X,Y)Z)``, so constant curvature ``k`` gives
  ``Ric = (n-1) k g`` and ``R = k/2 g (.) g``;
* arrays produced by differentiation carry the derivative index last.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionError,
    NotPositiveDefinite,
    OrderError,
    SingularMetric,
    SpecError,
)
from .expr import FUNCTION_NAMES, Expr, evaluate, parse
from .jet import Jet, contract, seed_point, stack

__all__ = [
    "ChartManifold",
    "VectorFieldSpec",
    "PointFrame",
    "TensorValue",
    "frame_at",
    "riemann",
    "ricci_scalar",
    "lie_derivative_metric",
    "covariant_derivative",
    "covariant_derivative_vector",
    "grad_hess_laplacian",
    "divergence",
    "kulkarni_nomizu",
    "weyl_conharmonic",
    "nabla_ricci",
    "norms_inner",
    "curvature_derivation_on_ric",
    "to_orthonormal",
]

SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class ChartManifold:
    """A coordinate chart with a metric given by expressions.

    Only the upper triangle of ``metric`` is read; the lower triangle is
    mirrored from it.
    """

    coordinates: tuple[str, ...]
    metric: tuple[tuple[Expr, ...], ...]
    box: Optional[tuple[tuple[float, float], ...]] = None
    name: str = ""

    def __post_init__(self):
        n = len(self.coordinates)
        if n < 2:
            raise DimensionError("a chart needs at least two coordinates")
        if len(set(self.coordinates)) != n:
            raise SpecError("coordinate names must be distinct")
        clash = set(self.coordinates) & FUNCTION_NAMES
        if clash:
            raise SpecError(f"coordinate names clash with functions: {sorted(clash)}")
        if len(self.metric) != n or any(len(row) != n for row in self.metric):
            raise DimensionError(f"metric must be {n}x{n}")
        sym = tuple(
            tuple(self.metric[min(i, j)][max(i, j)] for j in range(n)) for i in range(n)
        )
        object.__setattr__(self, "metric", sym)
        if self.box is not None and len(self.box) != n:
            raise DimensionError("sampling box needs one interval per coordinate")

    @classmethod
    def from_strings(cls, coordinates, metric, box=None, name=""):
        """Build from expression text; lower-triangle entries may be ``None``."""
        coordinates = tuple(coordinates)
        n = len(coordinates)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                text = metric[min(i, j)][max(i, j)]
                row.append(parse(text, coordinates))
            rows.append(tuple(row))
        if box is not None:
            box = tuple((float(lo), float(hi)) for lo, hi in box)
        return cls(coordinates, tuple(rows), box, name)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)


@dataclass(frozen=True)
class VectorFieldSpec:
    components: tuple[Expr, ...]
    potential: Optional[Expr] = None

    @classmethod
    def from_strings(cls, coordinates, components, potential=None):
        comps = tuple(parse(c, coordinates) for c in components)
        pot = parse(potential, coordinates) if potential is not None else None
        return cls(comps, pot)


@dataclass(frozen=True)
class TensorValue:
    """Tensor field germ at a point.

    ``variance`` has one letter per slot, ``'u'`` (contravariant) or ``'d'``
    (covariant).  ``components`` gives the values; ``jet`` keeps the
    derivatives that are still available.
    """

    variance: str
    jet: Jet
    point: tuple[float, ...]

    def __post_init__(self):
        if len(self.variance) != self.jet.ndim:
            raise ValueError("variance length must equal the tensor rank")
        n = self.jet.nvars
        if any(d != n for d in self.jet.shape):
            raise ValueError("every tensor axis must have the manifold dimension")

    @property
    def components(self):
        return self.jet.value

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def order(self) -> int:
        return self.jet.order

    def __float__(self) -> float:
        return float(self.jet)


@dataclass(frozen=True, eq=False)
class PointFrame:
    """All metric-derived data at one chart point."""

    manifold: ChartManifold
    point: tuple[float, ...]
    order: int
    coords: tuple[Jet, ...] = field(repr=False)
    metric: Jet = field(repr=False)
    metric_inv: Jet = field(repr=False)
    christoffel: Jet = field(repr=False)  # Gamma^k_ij as [k, i, j]
    det_g: float = 0.0

    @property
    def n(self) -> int:
        return len(self.point)

    # numeric views
    @property
    def g(self) -> np.ndarray:
        return self.metric.value

    @property
    def g_inv(self) -> np.ndarray:
        return self.metric_inv.value

    @property
    def dg(self) -> np.ndarray:
        """``dg[i, j, k] = d_k g_ij``."""
        return self.metric.derivatives(1)

    @property
    def d2g(self) -> Optional[np.ndarray]:
        return self.metric.derivatives(2) if self.order >= 2 else None

    @property
    def d3g(self) -> Optional[np.ndarray]:
        return self.metric.derivatives(3) if self.order >= 3 else None

    @property
    def gamma(self) -> np.ndarray:
        return self.christoffel.value

    @property
    def dgamma(self) -> Optional[np.ndarray]:
        """``dgamma[k, i, j, l] = d_l Gamma^k_ij``."""
        return self.christoffel.derivatives(1) if self.order >= 2 else None

    @property
    def d2gamma(self) -> Optional[np.ndarray]:
        return self.christoffel.derivatives(2) if self.order >= 3 else None

    # field evaluation
    def scalar(self, node) -> Jet:
        """Scalar field from an expression (or pass a jet through)."""
        if isinstance(node, TensorValue):
            node = node.jet
        if isinstance(node, Jet):
            return node
        env = dict(zip(self.manifold.coordinates, self.coords))
        return evaluate(node, env)

    def vector(self, V) -> Jet:
        """Contravariant components of a vector field as a jet of shape (n,)."""
        if isinstance(V, TensorValue):
            return V.jet
        if isinstance(V, Jet):
            return V
        comps = V.components if isinstance(V, VectorFieldSpec) else V
        if len(comps) != self.n:
            raise DimensionError(f"vector field needs {self.n} components")
        return stack([self.scalar(c) for c in comps])

    def tensor(self, variance: str, j: Jet) -> TensorValue:
        return TensorValue(variance, j, self.point)

    # cached curvature
    @functools.cached_property
    def riemann_jet(self) -> Jet:
        if self.order < 2:
            raise OrderError("curvature needs a frame of order >= 2")
        G = self.christoffel
        dG = G.grad()  # [l, j, k, i] = d_i Gamma^l_jk
        t = dG.transpose(0, 3, 1, 2)  # [l, i, j, k]
        GG = contract("lim,mjk->lijk", G, G)
        return t - t.transpose(0, 2, 1, 3) + GG - GG.transpose(0, 2, 1, 3)

    @functools.cached_property
    def riemann_lowered_jet(self) -> Jet:
        return contract("lijk,wl->ijkw", self.riemann_jet, self.metric)

    @functools.cached_property
    def ricci_jet(self) -> Jet:
        return contract("iijk->jk", self.riemann_jet)

    @functools.cached_property
    def ricci_operator_jet(self) -> Jet:
        return contract("ik,kj->ij", self.metric_inv, self.ricci_jet)

    @functools.cached_property
    def scalar_curvature_jet(self) -> Jet:
        return contract("jk,jk->", self.metric_inv, self.ricci_jet)

    @functools.cached_property
    def cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self.g)

    @functools.cached_property
    def orthonormal_frame(self) -> np.ndarray:
        """Columns form a g-orthonormal basis: ``E.T @ g @ E = I``."""
        return np.linalg.inv(self.cholesky).T

    def orthonormal(self, arr, variance: str) -> np.ndarray:
        return to_orthonormal(self, arr, variance)


def to_orthonormal(frame: PointFrame, arr, variance: str) -> np.ndarray:
    """Components of a tensor in the g-orthonormal frame of ``frame``."""
    if isinstance(arr, TensorValue):
        arr = arr.components
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != len(variance):
        raise ValueError("variance does not match tensor rank")
    down = frame.orthonormal_frame  # covariant slots: T_i E_ia
    up = frame.cholesky  # contravariant slots: V^i L_ia
    for axis, v in enumerate(variance):
        m = down if v == "d" else up
        arr = np.moveaxis(np.tensordot(arr, m, axes=([axis], [0])), -1, axis)
    return arr


def _inverse_jet(g: Jet, g0_inv: np.ndarray) -> Jet:
    """Neumann series of (g0 + H)^-1, exact to the jet order."""
    H = g - g.value
    X = -contract("ij,jk->ik", g0_inv, H)
    term = Jet.constant(g0_inv, g.nvars, g.order)
    acc = term
    for _ in range(g.order):
        term = contract("ij,jk->ik", X, term)
        acc = acc + term
    return acc


def frame_at(m: ChartManifold, p: Sequence[float], order: int = 3) -> PointFrame:
    """Metric jets, inverse and Christoffel symbols at ``p``."""
    if order < 1:
        raise OrderError("frame order must be at least 1")
    p = tuple(float(x) for x in p)
    n = m.dimension
    if len(p) != n:
        raise DimensionError(f"point needs {n} coordinates, got {len(p)}")
    coords = tuple(seed_point(p, order))
    env = dict(zip(m.coordinates, coords))
    upper = {}
    for i in range(n):
        for j in range(i, n):
            upper[i, j] = evaluate(m.metric[i][j], env)
    g = stack([stack([upper[min(i, j), max(i, j)] for j in range(n)]) for i in range(n)])
    g0 = g.value
    det = float(np.linalg.det(g0))
    scale = float(np.max(np.abs(g0)))
    if abs(det) < SINGULAR_RTOL * scale**n or scale == 0.0:
        raise SingularMetric(f"metric is singular at {p} (det = {det:.3g})")
    try:
        np.linalg.cholesky(g0)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"metric is not positive definite at {p}") from None
    g_inv = _inverse_jet(g, np.linalg.inv(g0))

    dg = g.grad()  # [i, j, k] = d_k g_ij
    # first kind: A[i, j, l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    A = 0.5 * (dg.transpose(2, 0, 1) + dg.transpose(0, 2, 1) - dg)
    gamma = contract("kl,ijl->kij", g_inv, A)
    return PointFrame(m, p, order, coords, g, g_inv, gamma, det)


# -- operations -------------------------------------------------------------


def riemann(frame: PointFrame) -> tuple[TensorValue, TensorValue]:
    """Curvature as (1,3) ``R[l,i,j,k]`` and lowered (0,4) ``R[i,j,k,w]``."""
    return (
        frame.tensor("uddd", frame.riemann_jet),
        frame.tensor("dddd", frame.riemann_lowered_jet),
    )


def ricci_scalar(frame: PointFrame) -> tuple[TensorValue, TensorValue, TensorValue]:
    """Ricci tensor, Ricci operator Q (``Q[i,j] = Q^i_j``) and scalar curvature."""
    return (
        frame.tensor("dd", frame.ricci_jet),
        frame.tensor("ud", frame.ricci_operator_jet),
        frame.tensor("", frame.scalar_curvature_jet),
    )


def lie_derivative_metric(frame: PointFrame, V) -> TensorValue:
    """(L_V g)_ij = V^k d_k g_ij + g_kj d_i V^k + g_ik d_j V^k."""
    v = frame.vector(V)
    dv = v.grad()  # [k, i] = d_i V^k
    dg = frame.metric.grad()
    t = contract("k,ijk->ij", v, dg)
    s = contract("kj,ki->ij", frame.metric, dv)
    return frame.tensor("dd", t + s + s.T)


def covariant_derivative(frame: PointFrame, T: TensorValue) -> TensorValue:
    """nabla T with the derivative slot appended last (covariant)."""
    j = T.jet
    G = frame.christoffel
    out = j.grad()
    letters = "abcdefgh"[: T.rank]
    for axis, v in enumerate(T.variance):
        src = letters[:axis] + "q" + letters[axis + 1 :]
        if v == "u":
            # + Gamma^a_{m q} T^{..q..}
            out = out + contract(f"{letters[axis]}mq,{src}->{letters}m", G, j)
        else:
            # - Gamma^q_{m a} T_{..q..}
            out = out - contract(f"qm{letters[axis]},{src}->{letters}m", G, j)
    return frame.tensor(T.variance + "d", out)


def covariant_derivative_vector(frame: PointFrame, V) -> TensorValue:
    """``(nabla V)[i, j] = d_j V^i + Gamma^i_jk V^k``, i.e. nabla_{d_j} V."""
    return covariant_derivative(frame, frame.tensor("u", frame.vector(V)))


def grad_hess_laplacian(frame: PointFrame, f) -> tuple[TensorValue, TensorValue, TensorValue]:
    if frame.order < 2:
        raise OrderError("Hessian needs a frame of order >= 2")
    fj = frame.scalar(f)
    df = fj.grad()
    grad = contract("ij,j->i", frame.metric_inv, df)
    hess = df.grad() - contract("kij,k->ij", frame.christoffel, df)
    lap = contract("ij,ij->", frame.metric_inv, hess)
    return frame.tensor("u", grad), frame.tensor("dd", hess), frame.tensor("", lap)


def divergence(frame: PointFrame, arg) -> TensorValue:
    """Divergence of a vector field, or ``(div T)_j = g^ik (nabla_i T)_kj``."""
    if isinstance(arg, TensorValue) and arg.variance == "dd":
        nT = covariant_derivative(frame, arg).jet  # [k, j, i]
        return frame.tensor("d", contract("ik,kji->j", frame.metric_inv, nT))
    v = frame.vector(arg)
    nv = covariant_derivative(frame, frame.tensor("u", v)).jet
    return frame.tensor("", contract("ii->", nv))


def _kn_product(a, b):
    # (a . b)_xyzw = a_xw b_yz + a_yz b_xw - a_xz b_yw - a_yw b_xz
    return (
        contract("xw,yz->xyzw", a, b)
        + contract("yz,xw->xyzw", a, b)
        - contract("xz,yw->xyzw", a, b)
        - contract("yw,xz->xyzw", a, b)
    )


def kulkarni_nomizu(T1, T2):
    """Kulkarni-Nomizu product of two (0,2) tensors.

    Accepts :class:`TensorValue`, jets or plain arrays and returns the same
    kind of object.
    """
    if isinstance(T1, TensorValue) or isinstance(T2, TensorValue):
        point = T1.point if isinstance(T1, TensorValue) else T2.point
        a = T1.jet if isinstance(T1, TensorValue) else T1
        b = T2.jet if isinstance(T2, TensorValue) else T2
        if isinstance(T1, TensorValue) and isinstance(T2, TensorValue) and T1.point != T2.point:
            raise ValueError("tensors live at different points")
        return TensorValue("dddd", _kn_product(a, b), point)
    return _kn_product(T1, T2)


def weyl_conharmonic(frame: PointFrame) -> tuple[TensorValue, TensorValue]:
    """Weyl tensor (0,4) and conharmonic tensor (1,3) ``H[l,i,j,k]``."""
    n = frame.n
    if n < 3:
        raise DimensionError("Weyl and conharmonic tensors need n >= 3")
    g = frame.metric
    ric = frame.ricci_jet
    Q = frame.ricci_operator_jet
    scal = frame.scalar_curvature_jet
    W = (
        frame.riemann_lowered_jet
        + _kn_product(g, g) * (scal / (2.0 * (n - 1) * (n - 2)))
        - _kn_product(ric, g) * (1.0 / (n - 2))
    )
    eye = np.eye(n)
    # H(X,Y)Z = R(X,Y)Z + [g(Z,X)QY - g(Y,Z)QX + Ric(Z,X)Y - Ric(Y,Z)X]/(n-2)
    corr = (
        contract("ki,lj->lijk", g, Q)
        - contract("jk,li->lijk", g, Q)
        + contract("ki,lj->lijk", ric, eye)
        - contract("jk,li->lijk", ric, eye)
    )
    H = frame.riemann_jet + corr * (1.0 / (n - 2))
    return frame.tensor("dddd", W), frame.tensor("uddd", H)


def nabla_ricci(frame: PointFrame) -> TensorValue:
    """``(nabla_X Ric)(Y, Z)`` stored as ``[x, y, z]``."""
    if frame.order < 3:
        raise OrderError("nabla Ric needs a frame of order 3")
    ric = frame.tensor("dd", frame.ricci_jet)
    nr = covariant_derivative(frame, ric).jet  # [y, z, x]
    return frame.tensor("ddd", nr.transpose(2, 0, 1))


def norms_inner(frame: PointFrame, S, T) -> tuple[float, float]:
    """Full pairing <S,T> = S_ij T_kl g^ik g^jl and |S|^2."""
    s = S.components if isinstance(S, TensorValue) else np.asarray(S)
    t = T.components if isinstance(T, TensorValue) else np.asarray(T)
    gi = frame.g_inv
    inner = float(np.einsum("ij,kl,ik,jl->", s, t, gi, gi))
    norm = float(np.einsum("ij,kl,ik,jl->", s, s, gi, gi))
    return inner, norm


def curvature_derivation_on_ric(frame: PointFrame, V) -> TensorValue:
    """``D(X;Y,Z) = Ric(R(V,X)Y, Z) + Ric(Y, R(V,X)Z)`` as ``[x, y, z]``.

    ``R(V,X).Ric = 0`` holds exactly when D vanishes.
    """
    v = frame.vector(V)
    RV = contract("i,lijk->ljk", v, frame.riemann_jet)  # R(V, d_j) d_k
    ric = frame.ricci_jet
    D = contract("lxy,lz->xyz", RV, ric) + contract("yl,lxz->xyz", ric, RV)
    return frame.tensor("ddd", D)
