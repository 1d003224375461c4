"""Soliton input description and the per-point field cache."""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .. import geometry as geo
from ..errors import DimensionError, MissingLambda, SpecError, ZeroVectorField
from ..expr import Expr, parse
from ..geometry import ChartManifold, VectorFieldSpec
from ..jet import Jet, contract

KINDS = ("riemann", "ricci")
ZERO_VECTOR = 1e-12


@dataclass(frozen=True)
class SolitonInput:
    manifold: ChartManifold
    V: VectorFieldSpec
    kind: str = "riemann"
    lam: Optional[Expr] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"soliton kind must be one of {KINDS}, got {self.kind!r}")
        if len(self.V.components) != self.manifold.dimension:
            raise DimensionError("vector field needs one component per coordinate")

    @classmethod
    def from_strings(
        cls,
        coordinates,
        metric,
        vector,
        potential=None,
        lam=None,
        kind="riemann",
        box=None,
        name="",
    ) -> "SolitonInput":
        m = ChartManifold.from_strings(coordinates, metric, box, name)
        V = VectorFieldSpec.from_strings(m.coordinates, vector, potential)
        lam_ast = parse(lam, m.coordinates) if lam is not None else None
        return cls(m, V, kind, lam_ast)

    @property
    def n(self) -> int:
        return self.manifold.dimension

    def with_lambda(self, lam) -> "SolitonInput":
        if isinstance(lam, str):
            lam = parse(lam, self.manifold.coordinates)
        return replace(self, lam=lam)

    def with_kind(self, kind: str) -> "SolitonInput":
        return replace(self, kind=kind)


class SolitonPoint:
    """Lazily computed fields of a soliton input at one point.

    Attributes ending in ``_j`` are jets; everything else is numeric.
    """

    def __init__(self, inp: SolitonInput, point, order: int = 3):
        self.input = inp
        self.frame = geo.frame_at(inp.manifold, point, order)
        self.point = self.frame.point
        self.order = order
        self.n = inp.n

    # -- basic fields --------------------------------------------------------

    @functools.cached_property
    def V_j(self) -> Jet:
        return self.frame.vector(self.input.V)

    @functools.cached_property
    def lam_j(self) -> Jet:
        if self.input.lam is None:
            raise MissingLambda("this check needs the soliton function lambda")
        return self.frame.scalar(self.input.lam)

    @property
    def has_lambda(self) -> bool:
        return self.input.lam is not None

    @functools.cached_property
    def potential_j(self) -> Optional[Jet]:
        if self.input.V.potential is None:
            return None
        return self.frame.scalar(self.input.V.potential)

    @functools.cached_property
    def theta_j(self) -> Jet:
        return contract("ij,j->i", self.frame.metric, self.V_j)

    @functools.cached_property
    def norm_sq_j(self) -> Jet:
        return contract("i,i->", self.theta_j, self.V_j)

    @property
    def norm_sq(self) -> float:
        return float(self.norm_sq_j)

    def require_nonzero(self):
        if np.sqrt(max(self.norm_sq, 0.0)) <= ZERO_VECTOR:
            raise ZeroVectorField(f"vector field vanishes at {self.point}")

    @functools.cached_property
    def nabla_V_j(self) -> Jet:
        return geo.covariant_derivative_vector(self.frame, self.V_j).jet

    @functools.cached_property
    def div_V_j(self) -> Jet:
        return contract("ii->", self.nabla_V_j)

    @functools.cached_property
    def lie_g_j(self) -> Jet:
        return geo.lie_derivative_metric(self.frame, self.V_j).jet

    @property
    def ric_j(self) -> Jet:
        return self.frame.ricci_jet

    @property
    def Q_j(self) -> Jet:
        return self.frame.ricci_operator_jet

    @property
    def scal_j(self) -> Jet:
        return self.frame.scalar_curvature_jet

    @property
    def R_j(self) -> Jet:
        return self.frame.riemann_jet

    @property
    def Rd_j(self) -> Jet:
        return self.frame.riemann_lowered_jet

    @functools.cached_property
    def gg_j(self) -> Jet:
        """g (.) g  (so G = gg / 2)."""
        return geo.kulkarni_nomizu(self.frame.metric, self.frame.metric)

    # -- derived scalars -----------------------------------------------------

    def along_V(self, s: Jet) -> Jet:
        """Directional derivative V(s)."""
        return contract("i,i->", self.V_j, s.grad())

    def grad(self, s: Jet) -> Jet:
        return contract("ij,j->i", self.frame.metric_inv, s.grad())

    def laplacian(self, s: Jet) -> Jet:
        return geo.grad_hess_laplacian(self.frame, s)[2].jet

    def norm_sq_of(self, T: Jet, variance: str) -> Jet:
        """Full metric norm squared of a tensor jet."""
        g, gi = self.frame.metric, self.frame.metric_inv
        out = T
        letters = "abcdefgh"[: len(variance)]
        other = "ijklmnop"[: len(variance)]
        lowered = T
        for axis, v in enumerate(variance):
            m = g if v == "u" else gi
            src = other[:axis] + letters[axis] + other[axis + 1 :]
            lowered = contract(f"{letters[axis]}{other[axis]},{src}->{other}", m, lowered)
        return contract(f"{other},{other}->", lowered, out)

    @functools.cached_property
    def nabla_V_norm_sq_j(self) -> Jet:
        return self.norm_sq_of(self.nabla_V_j, "ud")

    # -- numeric helpers -----------------------------------------------------

    def on(self, x, variance: str) -> np.ndarray:
        """Orthonormal-frame components of a tensor (jet or array)."""
        if isinstance(x, Jet):
            x = x.value
        return self.frame.orthonormal(np.asarray(x, dtype=float), variance)

    # -- torse-forming decomposition as jets ---------------------------------

    @functools.cached_property
    def torse_j(self) -> tuple[Jet, Jet]:
        """Least-squares (a, psi) with nabla V = a I + psi (x) V, as jets.

        Closed form: with P the g-orthogonal projector onto V-perp,
        a = tr(P nabla V)/(n-1) and psi = theta((nabla V) - a I)/|V|^2.
        """
        self.require_nonzero()
        M, V, th = self.nabla_V_j, self.V_j, self.theta_j
        nsq = self.norm_sq_j
        thMV = contract("i,ij,j->", th, M, V)
        a = (self.div_V_j - thMV / nsq) * (1.0 / (self.n - 1))
        psi = (contract("i,ij->j", th, M) - th * a) / nsq
        return a, psi

    @property
    def a_j(self) -> Jet:
        return self.torse_j[0]

    @property
    def psi_j(self) -> Jet:
        return self.torse_j[1]

    @functools.cached_property
    def zeta_j(self) -> Jet:
        return contract("ij,j->i", self.frame.metric_inv, self.psi_j)

    @functools.cached_property
    def torse_residual_j(self) -> Jet:
        """nabla V - a I - psi (x) V  as a (1,1) tensor."""
        a, psi = self.torse_j
        eye = np.eye(self.n)
        return self.nabla_V_j - a * eye - contract("i,j->ij", self.V_j, psi)

    def torse_holds(self, tol: float) -> tuple[bool, float]:
        res = self.on(self.torse_residual_j, "ud")
        scale = np.abs(self.on(self.nabla_V_j, "ud")).max()
        r = float(np.abs(res).max())
        return r <= tol * max(1.0, scale), r

    @functools.cached_property
    def nabla_psi_j(self) -> Jet:
        """``[j, i] = (nabla_i psi)_j``."""
        return geo.covariant_derivative(self.frame, self.frame.tensor("d", self.psi_j)).jet

    @functools.cached_property
    def psi_of_V_j(self) -> Jet:
        return contract("i,i->", self.psi_j, self.V_j)


@functools.lru_cache(maxsize=256)
def point_context(inp: SolitonInput, point: tuple, order: int = 3) -> SolitonPoint:
    return SolitonPoint(inp, point, order)


def context(inp: SolitonInput, p, order: int = 3) -> SolitonPoint:
    return point_context(inp, tuple(float(x) for x in p), order)


def require_dimension(inp: SolitonInput, minimum: int = 3):
    if inp.n < minimum:
        raise DimensionError(f"this check needs n >= {minimum}, got n = {inp.n}")
