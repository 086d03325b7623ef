"""Built-in manifold constructors.

Four model families plus two randomized test fixtures:

* ``flat``            flat ℂⁿ: identity metric, constant block J
* ``cpn``             complex projective space with the Fubini-Study
                      metric, parameterized by holomorphic sectional
                      curvature c > 0 (inhomogeneous-coordinate chart)
* ``cdn``             the complex hyperbolic unit ball, Bergman-type
                      metric, holomorphic sectional curvature c < 0
* ``s6``              the round unit 6-sphere with the almost-complex
                      structure induced by the 7-dimensional cross
                      product (strictly nearly Kähler)
* ``perturbed-flat``  seeded random polynomial perturbation of a flat
                      metric, no complex structure (exercises the
                      Riemannian-only paths)
* ``kahler-bump``     seeded random Kähler metric from a perturbed
                      potential (non-Einstein, curvature not constant)

The ℂPⁿ/ℂDⁿ metrics are emitted as expression matrices from the
real-coordinate expansion of the Kähler-potential Hessian rather than
hand-entered per n.  With z_k = x_{2k-1} + i·x_{2k} and Hermitian
components h = A + iB, the real metric blocks are

    g[x_i, x_j] = g[y_i, y_j] = 2 A_ij
    g[x_i, y_j] = -g[y_i, x_j] = 2 B_ij .
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import jets
from .errors import SchemaError
from .geometry import (
    CallableMatrixField,
    ExprMatrixField,
    ManifoldSpec,
    SampleBox,
)
from . import exprlang


# ---------------------------------------------------------------------------
# expression helpers


def _num(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(float(value))


def _rho(dim: int) -> str:
    return "(" + " + ".join(f"x{a}^2" for a in range(1, dim + 1)) + ")"


def _re_pair(i: int, j: int) -> str:
    # Re(conj(z_i) z_j) in real coordinates
    return f"(x{2*i-1}*x{2*j-1} + x{2*i}*x{2*j})"


def _im_pair(i: int, j: int) -> str:
    # Im(conj(z_i) z_j)
    return f"(x{2*i-1}*x{2*j} - x{2*i}*x{2*j-1})"


def standard_j_entries(n: int) -> list[list[str]]:
    """Constant block J: J(∂_{2k-1}) = ∂_{2k}, J(∂_{2k}) = −∂_{2k-1}."""
    d = 2 * n
    out = [["0"] * d for _ in range(d)]
    for k in range(n):
        out[2 * k + 1][2 * k] = "1"
        out[2 * k][2 * k + 1] = "-1"
    return out


def _hermitian_to_real_entries(n: int, a_entries, b_entries) -> list[list[str]]:
    """Assemble the real 2n x 2n expression matrix from Hermitian parts.

    ``a_entries(i, j)`` / ``b_entries(i, j)`` return expression strings for
    A_ij and B_ij (1-based i, j); ``b_entries`` may return "0".
    """
    d = 2 * n
    out = [["0"] * d for _ in range(d)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            a = a_entries(i, j)
            b = b_entries(i, j)
            out[2 * i - 2][2 * j - 2] = _scale(2.0, a)
            out[2 * i - 1][2 * j - 1] = _scale(2.0, a)
            out[2 * i - 2][2 * j - 1] = _scale(2.0, b)
            out[2 * i - 1][2 * j - 2] = _scale(-2.0, b)
    return out


def _scale(factor: float, entry: str) -> str:
    if entry == "0":
        return "0"
    return f"{_num(factor)} * {entry}"


# ---------------------------------------------------------------------------
# flat


def make_flat(n: int) -> ManifoldSpec:
    """Flat ℂⁿ on R^{2n}: identity metric, constant J."""
    if n < 1:
        raise SchemaError(f"flat model needs n >= 1, got {n}")
    d = 2 * n
    metric = [["1" if i == j else "0" for j in range(d)] for i in range(d)]
    return ManifoldSpec(
        name=f"flat-c{n}",
        dim=d,
        metric=ExprMatrixField(metric, d),
        complex_structure=ExprMatrixField(standard_j_entries(n), d),
        sample_box=SampleBox(np.zeros(d), np.ones(d)),
        params={"n": n},
        description=f"flat C^{n}: zero curvature, parallel J",
    )


# ---------------------------------------------------------------------------
# Fubini-Study / Bergman


def make_cpn(n: int, c: float) -> ManifoldSpec:
    """Complex projective space, holomorphic sectional curvature ``c > 0``.

    Inhomogeneous-coordinate chart on all of R^{2n}; Kähler potential
    (2/c)·log(1 + |z|²), so h_ij = (2/c)·((1+ρ)δ_ij − conj(z_i)z_j)/(1+ρ)².
    """
    if n < 1:
        raise SchemaError(f"cpn needs n >= 1, got {n}")
    if c <= 0:
        raise SchemaError(f"cpn needs holomorphic curvature c > 0, got {c}")
    d = 2 * n
    rho = _rho(d)
    den = f"(1 + {rho})^2"
    t = 2.0 / c

    def a_entry(i, j):
        if i == j:
            num = f"((1 + {rho}) - {_re_pair(i, j)})"
        else:
            num = f"(0 - {_re_pair(i, j)})"
        return f"{_num(t)} * {num} / {den}"

    def b_entry(i, j):
        if i == j:
            return "0"
        return f"{_num(-t)} * {_im_pair(i, j)} / {den}"

    return ManifoldSpec(
        name=f"cpn-{n}",
        dim=d,
        metric=ExprMatrixField(_hermitian_to_real_entries(n, a_entry, b_entry), d),
        complex_structure=ExprMatrixField(standard_j_entries(n), d),
        sample_box=SampleBox(np.zeros(d), 0.8 * np.ones(d)),
        params={"n": n, "c": float(c)},
        description=f"CP^{n}, Fubini-Study, holomorphic curvature {c:g}",
    )


def make_cdn(n: int, c: float) -> ManifoldSpec:
    """Complex hyperbolic unit ball, holomorphic sectional curvature ``c < 0``.

    Bergman-type potential −(2/|c|)·log(1 − |z|²) on the unit ball
    (domain expression 1 − |z|² > 0), so
    h_ij = (2/|c|)·((1−ρ)δ_ij + conj(z_i)z_j)/(1−ρ)².
    """
    if n < 1:
        raise SchemaError(f"cdn needs n >= 1, got {n}")
    if c >= 0:
        raise SchemaError(f"cdn needs holomorphic curvature c < 0, got {c}")
    d = 2 * n
    rho = _rho(d)
    den = f"(1 - {rho})^2"
    t = 2.0 / abs(c)

    def a_entry(i, j):
        if i == j:
            num = f"((1 - {rho}) + {_re_pair(i, j)})"
        else:
            num = _re_pair(i, j)
        return f"{_num(t)} * {num} / {den}"

    def b_entry(i, j):
        if i == j:
            return "0"
        return f"{_num(t)} * {_im_pair(i, j)} / {den}"

    return ManifoldSpec(
        name=f"cdn-{n}",
        dim=d,
        metric=ExprMatrixField(_hermitian_to_real_entries(n, a_entry, b_entry), d),
        complex_structure=ExprMatrixField(standard_j_entries(n), d),
        domain=exprlang.parse(f"1 - {rho}", d),
        sample_box=SampleBox(np.zeros(d), 0.55 * np.ones(d)),
        params={"n": n, "c": float(c)},
        description=f"CD^{n} unit ball, Bergman-type, holomorphic curvature {c:g}",
    )


# ---------------------------------------------------------------------------
# the 6-sphere


CROSS_TRIPLES = ((1, 2, 3), (1, 4, 5), (2, 4, 6), (3, 4, 7), (2, 5, 7), (1, 7, 6), (3, 6, 5))


@lru_cache(maxsize=1)
def cross_product_table() -> np.ndarray:
    """Structure constants f_ijk of the 7-dimensional cross product
    (e_i × e_j = e_k cyclically over each triple); totally antisymmetric."""
    f = np.zeros((7, 7, 7))
    for triple in CROSS_TRIPLES:
        for (i, j, k) in (triple, triple[1:] + triple[:1], triple[2:] + triple[:2]):
            f[i - 1, j - 1, k - 1] = 1.0
            f[j - 1, i - 1, k - 1] = -1.0
    return f


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """7-dimensional cross product on plain vectors."""
    return np.einsum("ijk,i,j->k", cross_product_table(), a, b)


def _cross_jets(a: np.ndarray, b: np.ndarray, ctx: jets.JetContext) -> np.ndarray:
    # a, b: (7, ncoef) jet components
    prod = jets.jet_mul(a[:, None, :], b[None, :, :], ctx)
    return np.einsum("ijk,ijc->kc", cross_product_table(), prod)


def s6_embedding(point, order: int, pole: str = "north") -> np.ndarray:
    """Jets of the unit-sphere embedding R⁶ -> R⁷ on a stereographic chart.

    Returns shape ``(7, ncoef(order))``.  The two charts differ by the sign
    of the last embedding coordinate; they overlap away from the origin and
    are glued by v = u/|u|².
    """
    ctx = jets.get_context(6, order)
    rows = jets.seed_coeffs(point, ctx)
    rho = jets.jet_mul(rows, rows, ctx).sum(axis=0)
    denom = rho.copy()
    denom[0] += 1.0
    inv = jets.reciprocal_coeffs(denom, ctx)
    X = np.empty((7, ctx.ncoef))
    X[:6] = 2.0 * jets.jet_mul(rows, inv[None, :], ctx)
    last = -rho
    last[0] += 1.0
    sign = 1.0 if pole == "north" else -1.0
    X[6] = sign * jets.jet_mul(last, inv, ctx)
    return X


def s6_chart_transition(point: np.ndarray) -> np.ndarray:
    """Coordinate change between the two stereographic charts: u -> u/|u|²."""
    p = np.asarray(point, dtype=float)
    return p / float(p @ p)


def _s6_j_field(pole: str):
    def entries(point, order: int) -> np.ndarray:
        # J(∂_i) = p × ∂_i X, projected to the tangent space and solved back
        # into chart components; the embedding is seeded one order higher
        # because the construction differentiates it once.
        ctx_hi = jets.get_context(6, order + 1)
        ctx = jets.get_context(6, order)
        X = s6_embedding(point, order + 1, pole)
        dX = np.stack([jets.partial_coeffs(X, m, ctx_hi) for m in range(6)])
        Xl = jets.truncate_coeffs(X, ctx_hi, order)

        w = np.stack([_cross_jets(Xl, dX[i], ctx) for i in range(6)])  # (i, comp)
        # tangent projection v -> v − <v, X> X (a no-op up to rounding,
        # since p × v ⊥ p, but it pins the construction down)
        inner = jets.jet_mul(w, Xl[None, :, :], ctx).sum(axis=1)  # (i, ncoef)
        w = w - jets.jet_mul(inner[:, None, :], Xl[None, :, :], ctx)

        gram = jets.jet_einsum("ja,ma->jm", dX, dX, ctx)
        rhs = jets.jet_einsum("ja,ia->ji", dX, w, ctx)
        inv0 = np.linalg.inv(gram[..., 0])
        G_inv = np.zeros_like(gram)
        G_inv[..., 0] = inv0
        twoI = np.zeros_like(gram)
        twoI[..., 0] = 2.0 * np.eye(6)
        for _ in range(2):
            K = twoI - jets.jet_einsum("ab,bc->ac", gram, G_inv, ctx)
            G_inv = jets.jet_einsum("ab,bc->ac", G_inv, K, ctx)
        return jets.jet_einsum("jm,mi->ji", G_inv, rhs, ctx)

    return entries


def make_s6(pole: str = "north") -> ManifoldSpec:
    """Round unit 6-sphere with the cross-product almost-complex structure.

    The stereographic chart covers the sphere minus one pole; the metric is
    the induced one, 4δ_ij/(1+|u|²)², entered in closed form (the suite
    cross-checks it against the embedding Gram matrix).  J at p is
    v ↦ p × v pulled back to the chart.  Strictly nearly Kähler.
    """
    if pole not in ("north", "south"):
        raise SchemaError(f"pole must be 'north' or 'south', got {pole!r}")
    d = 6
    rho = _rho(d)
    diag = f"4 / (1 + {rho})^2"
    metric = [[diag if i == j else "0" for j in range(d)] for i in range(d)]
    return ManifoldSpec(
        name="s6" if pole == "north" else "s6-south",
        dim=d,
        metric=ExprMatrixField(metric, d),
        complex_structure=CallableMatrixField(_s6_j_field(pole), d),
        sample_box=SampleBox(np.zeros(d), 0.8 * np.ones(d)),
        params={"pole": pole},
        description="round unit S6, cross-product J (strictly nearly Kahler)",
    )


# ---------------------------------------------------------------------------
# randomized fixtures


def make_perturbed_flat(n: int = 2, seed: int = 42, amplitude: float = 0.05) -> ManifoldSpec:
    """Flat metric plus a seeded random polynomial perturbation (degree <= 3).

    Carries no complex structure: exercises the Riemannian-only paths
    (curvature, Bianchi identities, Ricci contractions) on a metric with no
    special structure at all.
    """
    if n < 1:
        raise SchemaError(f"perturbed-flat needs n >= 1, got {n}")
    d = 2 * n
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    def poly() -> str:
        terms = []
        for degree in (1, 2, 3):
            coef = float(rng.integers(1, 5)) / 8.0 * float(rng.choice((-1.0, 1.0)))
            vs = rng.integers(1, d + 1, size=degree)
            terms.append(f"{_num(coef)} * " + " * ".join(f"x{v}" for v in vs))
        return " + ".join(terms)

    entries = [["0"] * d for _ in range(d)]
    amp = _num(amplitude)
    for i in range(d):
        for j in range(i, d):
            bump = f"{amp} * ({poly()})"
            entries[i][j] = f"1 + {bump}" if i == j else bump
            entries[j][i] = entries[i][j]

    return ManifoldSpec(
        name=f"perturbed-flat-{n}",
        dim=d,
        metric=ExprMatrixField(entries, d),
        complex_structure=None,
        sample_box=SampleBox(np.zeros(d), 0.6 * np.ones(d)),
        params={"n": n, "seed": seed, "amplitude": float(amplitude)},
        description="random polynomial perturbation of flat space (no J)",
    )


def make_kahler_bump(n: int = 2, seed: int = 7, amplitude: float = 0.05) -> ManifoldSpec:
    """Seeded random Kähler metric: potential ½|z|² plus quartic and sextic
    bumps.  Kähler by construction but neither Einstein nor of constant
    holomorphic curvature — the generic member of the most special class.

    The potential is Φ = ½|z|² + ε(Σ_{kl} a_kl |z_k|²|z_l|² + Σ_k b_k |z_k|⁶)
    with symmetric a; its Hessian gives
    A_ij = ½δ_ij + ε(2δ_ij Σ_l a_il |z_l|² + 9 b_i δ_ij |z_i|⁴ + 2 a_ij Re(conj(z_i)z_j))
    and B_ij = 2ε a_ij Im(conj(z_i)z_j).
    """
    if n < 1:
        raise SchemaError(f"kahler-bump needs n >= 1, got {n}")
    d = 2 * n
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    a = np.zeros((n + 1, n + 1))
    for k in range(1, n + 1):
        for l in range(k, n + 1):
            a[k, l] = a[l, k] = float(rng.integers(1, 5)) / 8.0
    b = [0.0] + [float(rng.integers(1, 4)) / 16.0 for _ in range(n)]
    eps = float(amplitude)

    def zsq(k: int) -> str:
        return f"(x{2*k-1}^2 + x{2*k}^2)"

    def a_entry(i, j):
        if i == j:
            radial = " + ".join(f"{_num(2.0 * a[i, l])} * {zsq(l)}" for l in range(1, n + 1))
            bump = f"({radial} + {_num(9.0 * b[i])} * {zsq(i)}^2 + {_num(2.0 * a[i, i])} * {_re_pair(i, i)})"
            return f"(0.5 + {_num(eps)} * {bump})"
        return f"{_num(eps * 2.0 * a[i, j])} * {_re_pair(i, j)}"

    def b_entry(i, j):
        if i == j:
            return "0"
        return f"{_num(eps * 2.0 * a[i, j])} * {_im_pair(i, j)}"

    return ManifoldSpec(
        name=f"kahler-bump-{n}",
        dim=d,
        metric=ExprMatrixField(_hermitian_to_real_entries(n, a_entry, b_entry), d),
        complex_structure=ExprMatrixField(standard_j_entries(n), d),
        sample_box=SampleBox(np.zeros(d), 0.6 * np.ones(d)),
        params={"n": n, "seed": seed, "amplitude": eps},
        description="random non-Einstein Kahler metric from a perturbed potential",
    )


# ---------------------------------------------------------------------------
# registry


BUILTIN_MODELS: dict[str, dict] = {
    "flat": {
        "factory": make_flat,
        "params": ("n",),
        "defaults": {"n": 2},
        "description": "flat C^n (params: --n)",
    },
    "cpn": {
        "factory": make_cpn,
        "params": ("n", "c"),
        "defaults": {"n": 2, "c": 4.0},
        "description": "complex projective space, Fubini-Study (params: --n, --c > 0)",
    },
    "cdn": {
        "factory": make_cdn,
        "params": ("n", "c"),
        "defaults": {"n": 2, "c": -4.0},
        "description": "complex hyperbolic ball, Bergman-type (params: --n, --c < 0)",
    },
    "s6": {
        "factory": make_s6,
        "params": (),
        "defaults": {},
        "description": "round unit 6-sphere, cross-product J (nearly Kahler)",
    },
    "perturbed-flat": {
        "factory": make_perturbed_flat,
        "params": ("n",),
        "defaults": {"n": 2},
        "description": "seeded random perturbed flat metric, no J (params: --n)",
    },
    "kahler-bump": {
        "factory": make_kahler_bump,
        "params": ("n",),
        "defaults": {"n": 2},
        "description": "seeded random non-Einstein Kahler metric (params: --n)",
    },
}


def build_builtin(name: str, n: int | None = None, c: float | None = None) -> ManifoldSpec:
    """Instantiate a builtin by CLI-style name and optional parameters."""
    if name not in BUILTIN_MODELS:
        known = ", ".join(sorted(BUILTIN_MODELS))
        raise SchemaError(f"unknown builtin manifold {name!r}; known: {known}")
    entry = BUILTIN_MODELS[name]
    kwargs = dict(entry["defaults"])
    if n is not None:
        if "n" not in entry["params"]:
            raise SchemaError(f"manifold {name!r} takes no --n parameter")
        kwargs["n"] = n
    if c is not None:
        if "c" not in entry["params"]:
            raise SchemaError(f"manifold {name!r} takes no --c parameter")
        kwargs["c"] = c
    return entry["factory"](**kwargs)
