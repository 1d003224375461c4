"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` stores the Taylor coefficients (partial derivative divided by
the multi-index factorial) of a function of ``nvars`` variables at a point, up
to total degree ``order``.  Coefficients live on the last axis of a numpy
array in graded-lexicographic order, so a jet may also carry a whole tensor
of scalar fields: ``coeffs.shape == tensor_shape + (size,)``.

Because the ordering is graded, truncating to a lower order is a prefix
slice, and the coefficient of a product is a plain Cauchy product.
"""

from __future__ import annotations

import functools
import itertools
import math
import numbers
import operator

import numpy as np

from .errors import DomainError, OrderError

__all__ = [
    "Jet",
    "multi_indices",
    "seed_point",
    "jet_apply",
    "partial",
    "contract",
    "stack",
]


@functools.lru_cache(maxsize=None)
def multi_indices(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples of total degree <= order, graded-lex ordered."""
    out = []
    for degree in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), degree):
            exps = [0] * nvars
            for v in combo:
                exps[v] += 1
            out.append(tuple(exps))
    return tuple(out)


def basis_size(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


class _Basis:
    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        self.exps = multi_indices(nvars, order)
        self.size = len(self.exps)
        self.index = {e: i for i, e in enumerate(self.exps)}
        self.degree = np.array([sum(e) for e in self.exps], dtype=int)
        self.factorial = np.array(
            [math.prod(math.factorial(k) for k in e) for e in self.exps], dtype=float
        )

        pi, pj, pk = [], [], []
        for i, ei in enumerate(self.exps):
            for j, ej in enumerate(self.exps):
                if self.degree[i] + self.degree[j] <= order:
                    pi.append(i)
                    pj.append(j)
                    pk.append(self.index[tuple(a + b for a, b in zip(ei, ej))])
        self.pair_i = np.array(pi, dtype=np.intp)
        self.pair_j = np.array(pj, dtype=np.intp)
        self.scatter = np.zeros((len(pk), self.size))
        self.scatter[np.arange(len(pk)), pk] = 1.0
        # unordered pairs i <= j; summing a_i b_j + a_j b_i per pair makes the
        # scalar product bitwise commutative
        upper = self.pair_i <= self.pair_j
        self.sym_i = self.pair_i[upper]
        self.sym_j = self.pair_j[upper]
        self.sym_w = np.where(self.sym_i == self.sym_j, 0.5, 1.0)
        self.sym_scatter = self.scatter[upper]

        # d/dx_k maps this basis onto the basis of order - 1
        self.deriv_src = []
        self.deriv_fac = []
        if order > 0:
            for k in range(nvars):
                src, fac = [], []
                for e in multi_indices(nvars, order - 1):
                    up = list(e)
                    up[k] += 1
                    src.append(self.index[tuple(up)])
                    fac.append(e[k] + 1)
                self.deriv_src.append(np.array(src, dtype=np.intp))
                self.deriv_fac.append(np.array(fac, dtype=float))


@functools.lru_cache(maxsize=None)
def _basis(nvars: int, order: int) -> _Basis:
    return _Basis(nvars, order)


def _is_real(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


class Jet:
    """Truncated Taylor expansion of a scalar (or tensor of scalars) at a point."""

    __slots__ = ("nvars", "order", "coeffs")
    # make numpy defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, coeffs, nvars: int, order: int, *, check: bool = True):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0 or coeffs.shape[-1] != basis_size(nvars, order):
            raise ValueError(
                f"expected trailing axis of size {basis_size(nvars, order)}, "
                f"got shape {coeffs.shape}"
            )
        if check and not np.isfinite(coeffs).all():
            raise DomainError("non-finite Taylor coefficient")
        self.nvars = nvars
        self.order = order
        self.coeffs = coeffs

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (basis_size(nvars, order),))
        c[..., 0] = value
        return cls(c, nvars, order)

    @classmethod
    def variable(cls, value: float, slot: int, nvars: int, order: int) -> "Jet":
        c = np.zeros(basis_size(nvars, order))
        c[0] = value
        if order > 0:
            c[1 + slot] = 1.0
        return cls(c, nvars, order)

    def _new(self, coeffs, order=None) -> "Jet":
        return Jet(coeffs, self.nvars, self.order if order is None else order)

    # -- inspection -------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.coeffs.ndim - 1

    @property
    def value(self):
        v = self.coeffs[..., 0]
        return float(v) if v.ndim == 0 else v.copy()

    def __float__(self) -> float:
        if self.shape:
            raise TypeError("only scalar jets convert to float")
        return float(self.coeffs[0])

    def partial(self, m) -> np.ndarray | float:
        """True partial derivative for multi-index ``m`` (coefficient * m!)."""
        m = tuple(int(k) for k in m)
        if len(m) != self.nvars or min(m, default=0) < 0:
            raise ValueError(f"multi-index {m} does not match {self.nvars} variables")
        if sum(m) > self.order:
            raise OrderError(f"derivative of degree {sum(m)} exceeds jet order {self.order}")
        b = _basis(self.nvars, self.order)
        i = b.index[m]
        out = self.coeffs[..., i] * b.factorial[i]
        return float(out) if out.ndim == 0 else out

    def derivatives(self, degree: int) -> np.ndarray:
        """Array of all partials of the given degree, derivative axes appended."""
        j = self
        for _ in range(degree):
            j = j.grad()
        return j.coeffs[..., 0].copy()

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, nvars={self.nvars}, order={self.order}, value={self.value!r})"

    # -- calculus ---------------------------------------------------------

    def derivative(self, k: int) -> "Jet":
        """Jet of d/dx_k, one order lower."""
        if self.order == 0:
            raise OrderError("cannot differentiate an order-0 jet")
        b = _basis(self.nvars, self.order)
        return self._new(self.coeffs[..., b.deriv_src[k]] * b.deriv_fac[k], self.order - 1)

    def grad(self) -> "Jet":
        """All first partials stacked on a new trailing tensor axis."""
        if self.order == 0:
            raise OrderError("cannot differentiate an order-0 jet")
        b = _basis(self.nvars, self.order)
        parts = [self.coeffs[..., b.deriv_src[k]] * b.deriv_fac[k] for k in range(self.nvars)]
        return self._new(np.stack(parts, axis=-2), self.order - 1)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return self._new(self.coeffs[..., : basis_size(self.nvars, order)], order)

    # -- tensor plumbing --------------------------------------------------

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis or i is None for i in idx):
            raise IndexError("ellipsis and newaxis are not supported on jets")
        return self._new(self.coeffs[idx])

    def transpose(self, *axes) -> "Jet":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        return self._new(self.coeffs.transpose(*axes, self.ndim))

    @property
    def T(self) -> "Jet":
        return self.transpose()

    # -- arithmetic -------------------------------------------------------

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets over different numbers of variables")
            return other
        return Jet.constant(other, self.nvars, self.order)

    @staticmethod
    def _align(a: "Jet", b: "Jet") -> tuple["Jet", "Jet"]:
        k = min(a.order, b.order)
        return a.truncate(k), b.truncate(k)

    def __add__(self, other):
        a, b = self._align(self, self._lift(other))
        return a._new(a.coeffs + b.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        a, b = self._align(self, self._lift(other))
        return a._new(a.coeffs - b.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            return self._new(self.coeffs * other[..., None])
        a, b = self._align(self, self._lift(other))
        return a._new(_cauchy(a.coeffs, b.coeffs, _basis(a.nvars, a.order)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            if np.any(other == 0):
                raise DomainError("division by zero")
            return self._new(self.coeffs / other[..., None])
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, other):
        if isinstance(other, Jet):
            if other.is_constant():
                return self.power(other.value if not other.shape else other.coeffs[..., 0])
            return exp(other * log(self))
        return self.power(other)

    def __rpow__(self, base):
        base = float(base)
        if self.is_constant():
            return Jet.constant(_float_pow(base, self.value), self.nvars, self.order)
        if base <= 0:
            raise DomainError("non-constant power of a non-positive base")
        return exp(self * math.log(base))

    def is_constant(self) -> bool:
        return not np.any(self.coeffs[..., 1:])

    # -- elementary functions ---------------------------------------------

    def _compose(self, taylor) -> "Jet":
        """f(self) given ``taylor(u0, m) = f^(m)(u0)/m!`` (arrays over the tensor shape)."""
        u0 = self.coeffs[..., 0]
        out = np.zeros_like(self.coeffs)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out[..., 0] = taylor(u0, 0)
            if self.order > 0:
                h = self.coeffs.copy()
                h[..., 0] = 0.0
                b = _basis(self.nvars, self.order)
                power = h
                for m in range(1, self.order + 1):
                    out += taylor(u0, m)[..., None] * power
                    if m < self.order:
                        power = _cauchy(power, h, b)
        return self._new(out)

    def reciprocal(self) -> "Jet":
        u0 = self.coeffs[..., 0]
        if np.any(u0 == 0):
            raise DomainError("division by a jet with zero value")
        return self._compose(lambda u, m: (-1.0) ** m * u ** (-m - 1.0))

    def power(self, p) -> "Jet":
        """Real exponent.  Integer exponents use repeated multiplication;
        other exponents go through exp(p*log(.)) and need a positive base."""
        p = np.asarray(p, dtype=float)
        if p.ndim == 0 and float(p).is_integer() and abs(float(p)) <= 64:
            n = int(p)
            if n < 0:
                return self.power(-n).reciprocal()
            result = Jet.constant(np.ones(self.shape), self.nvars, self.order)
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        if np.any(self.coeffs[..., 0] <= 0):
            raise DomainError("non-integer power of a non-positive value")
        return exp(log(self) * p)


def _cauchy(a: np.ndarray, b: np.ndarray, basis: _Basis) -> np.ndarray:
    i, j = basis.sym_i, basis.sym_j
    t = (a[..., i] * b[..., j] + a[..., j] * b[..., i]) * basis.sym_w
    return t @ basis.sym_scatter


def _float_pow(base: float, p: float) -> float:
    if base == 0 and p < 0:
        raise DomainError("division by zero")
    if base < 0 and not float(p).is_integer():
        raise DomainError("non-integer power of a negative value")
    try:
        return float(base**p)
    except OverflowError as exc:
        raise DomainError("overflow in power") from exc


# -- elementary functions over jets -----------------------------------------


def _check_positive(j: Jet, name: str):
    if np.any(j.coeffs[..., 0] <= 0):
        raise DomainError(f"{name} of a non-positive value")


def exp(j: Jet) -> Jet:
    return j._compose(lambda u, m: np.exp(u) / math.factorial(m))


def log(j: Jet) -> Jet:
    _check_positive(j, "log")

    def taylor(u, m):
        if m == 0:
            return np.log(u)
        return (-1.0) ** (m - 1) / (m * u**m)

    return j._compose(taylor)


def sqrt(j: Jet) -> Jet:
    _check_positive(j, "sqrt")
    return j._compose(lambda u, m: _binom(0.5, m) * u ** (0.5 - m))


def _binom(p: float, m: int) -> float:
    out = 1.0
    for i in range(m):
        out *= (p - i) / (i + 1)
    return out


def _cyclic(funcs):
    def taylor(u, m):
        return funcs[m % 4](u) / math.factorial(m)

    return taylor


def sin(j: Jet) -> Jet:
    return j._compose(_cyclic([np.sin, np.cos, lambda u: -np.sin(u), lambda u: -np.cos(u)]))


def cos(j: Jet) -> Jet:
    return j._compose(_cyclic([np.cos, lambda u: -np.sin(u), lambda u: -np.cos(u), np.sin]))


def sinh(j: Jet) -> Jet:
    return j._compose(_cyclic([np.sinh, np.cosh, np.sinh, np.cosh]))


def cosh(j: Jet) -> Jet:
    return j._compose(_cyclic([np.cosh, np.sinh, np.cosh, np.sinh]))


FUNCTIONS = {
    "exp": exp,
    "log": log,
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "sqrt": sqrt,
}

_BINARY = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
    "pow": operator.pow,
}
_ALIASES = {
    "+": "add",
    "-": "sub",
    "*": "mul",
    "/": "div",
    "^": "pow",
    "multiply": "mul",
    "divide": "div",
    "power": "pow",
    "subtract": "sub",
    "negate": "neg",
}


def jet_apply(op: str, *operands) -> Jet:
    """Apply an operation by tag: add, sub, mul, div, pow, neg or a function name."""
    op = _ALIASES.get(op, op)
    if not any(isinstance(x, Jet) for x in operands):
        raise TypeError("jet_apply needs at least one Jet operand")
    if op == "neg":
        (a,) = operands
        return -a
    if op in FUNCTIONS:
        (a,) = operands
        return FUNCTIONS[op](a)
    if op in _BINARY:
        a, b = operands
        # a scalar left operand goes through the reflected method, which scales
        # instead of forming a full product
        return _BINARY[op](a, b)
    raise ValueError(f"unknown jet operation {op!r}")


def seed_point(coords, order: int) -> list[Jet]:
    """One jet per coordinate: the coordinate function itself at the point."""
    coords = [float(c) for c in coords]
    if not coords:
        raise ValueError("need at least one coordinate")
    if order < 0:
        raise ValueError("order must be non-negative")
    n = len(coords)
    return [Jet.variable(c, i, n, order) for i, c in enumerate(coords)]


def partial(j: Jet, m) -> float:
    return j.partial(m)


def stack(items, axis: int = 0) -> Jet:
    """Stack jets (and constants) along a new tensor axis."""
    jets = [x for x in items if isinstance(x, Jet)]
    if not jets:
        raise TypeError("stack needs at least one Jet")
    ref = jets[0]
    order = min(j.order for j in jets)
    lifted = [ref._lift(x).truncate(order).coeffs for x in items]
    shape = np.broadcast_shapes(*(c.shape for c in lifted))
    lifted = [np.broadcast_to(c, shape) for c in lifted]
    ndim = len(shape) - 1
    if axis < 0:
        axis += ndim + 1
    return Jet(np.stack(lifted, axis=axis), ref.nvars, order)


# -- contractions -----------------------------------------------------------

_COEF = "Z"


def _pair(a, sa: str, b, sb: str, out: str):
    ja, jb = isinstance(a, Jet), isinstance(b, Jet)
    if not ja and not jb:
        return np.einsum(f"{sa},{sb}->{out}", a, b)
    if ja and not jb:
        return a._new(np.einsum(f"{sa}{_COEF},{sb}->{out}{_COEF}", a.coeffs, b))
    if jb and not ja:
        return b._new(np.einsum(f"{sa},{sb}{_COEF}->{out}{_COEF}", a, b.coeffs))
    a, b = Jet._align(a, b)
    basis = _basis(a.nvars, a.order)
    ai = a.coeffs[..., basis.pair_i]
    bj = b.coeffs[..., basis.pair_j]
    t = np.einsum(f"{sa}{_COEF},{sb}{_COEF}->{out}{_COEF}", ai, bj)
    return a._new(t @ basis.scatter)


def contract(subscripts: str, *operands):
    """``np.einsum`` over tensor axes where operands may be jets.

    Only explicit-output lowercase subscripts are supported; products of jets
    are truncated Cauchy products.
    """
    inputs, output = subscripts.replace(" ", "").split("->")
    inputs = inputs.split(",")
    if len(inputs) != len(operands):
        raise ValueError("subscripts do not match the number of operands")
    if not all(s.islower() or s == "" for s in inputs + [output]):
        raise ValueError("use lowercase subscripts only")

    acc, acc_sub = operands[0], inputs[0]
    for k in range(1, len(operands)):
        later = set("".join(inputs[k + 1 :]) + output)
        keep = "".join(dict.fromkeys(c for c in acc_sub + inputs[k] if c in later))
        acc = _pair(acc, acc_sub, operands[k], inputs[k], keep)
        acc_sub = keep
    if acc_sub != output or len(operands) == 1:
        if isinstance(acc, Jet):
            acc = acc._new(np.einsum(f"{acc_sub}{_COEF}->{output}{_COEF}", acc.coeffs))
        else:
            acc = np.einsum(f"{acc_sub}->{output}", acc)
    return acc
