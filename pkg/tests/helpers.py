"""Shared fixtures: the shipped example inputs and random analytic instances."""

import itertools

from hypothesis import strategies as st

from soliton_forge.soliton.context import SolitonInput

XYZ = ("x", "y", "z")

EX1 = SolitonInput.from_strings(
    XYZ, [["1/z^2", "0", "0"], [None, "1/z^2", "0"], [None, None, "1/z^2"]],
    ["0", "0", "1"], potential="-1/z", lam="-2/z - 1", kind="riemann",
)
EX2 = SolitonInput.from_strings(
    XYZ, [["exp(2*z)", "0", "0"], [None, "exp(2*z)", "0"], [None, None, "1"]],
    ["0", "0", "exp(z)"], potential="exp(z)", lam="2*exp(z) - 1", kind="riemann",
)
EX3 = EX1.with_kind("ricci").with_lambda("-1/z - 2")
EX4 = EX2.with_kind("ricci").with_lambda("exp(z) - 2")
EUCLID = SolitonInput.from_strings(
    XYZ, [["1", "0", "0"], [None, "1", "0"], [None, None, "1"]],
    ["1", "0", "0"], potential="x", lam="0", kind="riemann",
)

# monomials of degree <= 2 with their partial derivatives
MONOMIALS = {
    "x": ("1", "0", "0"),
    "y": ("0", "1", "0"),
    "z": ("0", "0", "1"),
    "x*y": ("y", "x", "0"),
    "y*z": ("0", "z", "y"),
    "x*z": ("z", "0", "x"),
    "x^2": ("2*x", "0", "0"),
    "y^2": ("0", "2*y", "0"),
    "z^2": ("0", "0", "2*z"),
}
# analytic terms with their partial derivatives
TRANSCENDENTAL = {
    "sin(x + y)": ("cos(x + y)", "cos(x + y)", "0"),
    "exp(z)": ("0", "0", "exp(z)"),
    "cos(x*z)": ("-z*sin(x*z)", "0", "-x*sin(x*z)"),
}

coefficient = st.integers(-20, 20).map(lambda k: k / 100)
# about half the terms vanish, which keeps the adjugate texts short
sparse = st.one_of(st.just(0.0), coefficient)


def _linear(coeffs, terms):
    parts = [f"({c!r})*({t})" for c, t in zip(coeffs, terms) if c != 0]
    return " + ".join(parts) if parts else "0"


@st.composite
def analytic_metrics(draw):
    """Upper-triangle metric strings, positive definite on [-0.3, 0.3]^3."""
    mons = list(MONOMIALS)
    rows = [[None] * 3 for _ in range(3)]
    for i, j in itertools.combinations_with_replacement(range(3), 2):
        cs = draw(st.lists(sparse, min_size=len(mons), max_size=len(mons)))
        body = _linear(cs, mons)
        if i == j:
            a, b = draw(coefficient), draw(coefficient)
            rows[i][j] = f"2 + {body} + ({a!r})*sin({XYZ[(i + 1) % 3]}) + ({b!r})*exp({XYZ[(i + 2) % 3]}/2)"
        else:
            rows[i][j] = f"({body})/4"
    return rows


@st.composite
def potentials(draw):
    """A potential f as text together with the texts of its partials."""
    terms = dict(MONOMIALS)
    terms.update(TRANSCENDENTAL)
    names = list(terms)
    cs = draw(st.lists(sparse, min_size=len(names), max_size=len(names)))
    f = _linear(cs, names)
    df = [_linear(cs, [terms[t][k] for t in names]) for k in range(3)]
    return f, df


def gradient_components(metric, df):
    """Texts of V = g^-1 df via the adjugate."""
    m = [[metric[min(i, j)][max(i, j)] for j in range(3)] for i in range(3)]
    g = lambda i, j: f"({m[i][j]})"  # noqa: E731

    def cof(i, j):
        r = [k for k in range(3) if k != i]
        c = [k for k in range(3) if k != j]
        sign = "" if (i + j) % 2 == 0 else "-"
        return f"{sign}({g(r[0], c[0])}*{g(r[1], c[1])} - {g(r[0], c[1])}*{g(r[1], c[0])})"

    det = " + ".join(f"{g(0, j)}*({cof(0, j)})" for j in range(3))
    # adj[i][j] = cof(j, i)
    return [
        "(" + " + ".join(f"({cof(j, i)})*({df[j]})" for j in range(3)) + f")/({det})"
        for i in range(3)
    ]


def random_gradient_input(metric, f, df, kind="riemann", lam=None):
    return SolitonInput.from_strings(XYZ, metric, gradient_components(metric, df), potential=f, lam=lam, kind=kind)
