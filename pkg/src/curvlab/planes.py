"""Frames, tangent 2-planes, sectional curvature, and the antiholomorphic
sectional-curvature statistic.

A 2-plane is holomorphic when it is J-invariant (y = ±Jx for orthonormal
spanning vectors) and antiholomorphic when it is J-orthogonal to its own
image; for a g-orthonormal pair (x, y) the latter reduces to the single
scalar condition g(Jx, y) = 0, since g(Jx, x) = 0 holds automatically by
antisymmetry of the lowered J.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import DimensionError, FrameConstructionError

_ORTHO_TOL = 1e-10


def gram_schmidt(vectors: np.ndarray, g: np.ndarray, drop_tol: float = 1e-8) -> np.ndarray:
    """g-orthonormalize rows of ``vectors`` (modified Gram-Schmidt).

    Raises :class:`FrameConstructionError` when a row is (numerically) in
    the span of the previous ones.
    """
    out = np.array(vectors, dtype=float)
    for k in range(out.shape[0]):
        v = out[k]
        for j in range(k):
            v = v - (out[j] @ g @ v) * out[j]
        nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
        if nrm < drop_tol:
            raise FrameConstructionError(
                f"vector {k} degenerated during orthonormalization (norm {nrm:.2e})"
            )
        out[k] = v / nrm
    return out


def orthonormal_frame(g: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Rows form a g-orthonormal basis; random when ``rng`` is given,
    otherwise deterministic from the coordinate basis."""
    d = g.shape[0]
    start = np.eye(d) if rng is None else rng.normal(size=(d, d))
    return gram_schmidt(start, g)


def random_unit_vector(g: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    for _ in range(16):
        v = rng.normal(size=g.shape[0])
        nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
        if nrm > 1e-8:
            return v / nrm
    raise FrameConstructionError("could not draw a unit vector")  # pragma: no cover


@dataclass(frozen=True)
class AdaptedFrame:
    """g-orthonormal basis of the form (u_1..u_n, Ju_1..Ju_n).

    ``vectors`` holds the 2n basis vectors as rows; row n+k is the J-image
    of row k.
    """

    vectors: np.ndarray

    @property
    def n(self) -> int:
        return self.vectors.shape[0] // 2

    def gram_residual(self, g: np.ndarray) -> float:
        gram = self.vectors @ g @ self.vectors.T
        return float(np.abs(gram - np.eye(self.vectors.shape[0])).max())

    def closure_residual(self, J: np.ndarray) -> float:
        n = self.n
        imaged = (J @ self.vectors[:n].T).T
        return float(np.abs(imaged - self.vectors[n:]).max())


def adapted_frame(g: np.ndarray, J: np.ndarray, rng: np.random.Generator) -> AdaptedFrame:
    """Greedy J-adapted frame: random u_1, normalize, append Ju_1, project
    the next random seed off the accumulated span, and so on."""
    d = g.shape[0]
    n = d // 2
    us: list[np.ndarray] = []
    jus: list[np.ndarray] = []
    for _ in range(n):
        for attempt in range(16):
            v = rng.normal(size=d)
            for w in (*us, *jus):
                v = v - (w @ g @ v) * w
            nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
            if nrm > 1e-8:
                break
        else:
            raise FrameConstructionError(
                "adapted frame: 16 random draws degenerated under projection"
            )
        u = v / nrm
        ju = J @ u
        # for a compatible J this is already unit and orthogonal to u; a tiny
        # re-orthogonalization keeps the Gram matrix at working precision
        ju = ju - (u @ g @ ju) * u
        ju = ju / float(np.sqrt(max(ju @ g @ ju, 0.0)))
        us.append(u)
        jus.append(ju)
    return AdaptedFrame(np.vstack([*us, *jus]))


@dataclass(frozen=True)
class Plane:
    """g-orthonormal spanning pair plus its holomorphy angle |g(Jx,y)|."""

    x: np.ndarray
    y: np.ndarray
    hol_angle: float

    def is_antiholomorphic(self) -> bool:
        return self.hol_angle <= _ORTHO_TOL

    def is_holomorphic(self) -> bool:
        return self.hol_angle >= 1.0 - _ORTHO_TOL


def _plane(g: np.ndarray, J: np.ndarray | None, x: np.ndarray, y: np.ndarray) -> Plane:
    angle = 0.0 if J is None else abs((J @ x) @ g @ y)
    return Plane(x, y, angle)


def sample_planes(
    g: np.ndarray,
    J: np.ndarray | None,
    kind: str,
    count: int,
    rng: np.random.Generator,
) -> list[Plane]:
    """Draw ``count`` g-orthonormal planes of the requested kind.

    kind 'holomorphic': y = Jx.  kind 'antiholomorphic': y unit in the
    g-orthogonal complement of span{x, Jx} (needs dim >= 4).  kind
    'random': unconstrained orthonormal pair.
    """
    d = g.shape[0]
    planes: list[Plane] = []
    if kind in ("holomorphic", "antiholomorphic") and J is None:
        raise DimensionError(f"{kind} planes need an almost-complex structure")
    if kind == "antiholomorphic" and d < 4:
        raise DimensionError(
            f"antiholomorphic planes need dim >= 4 (got {d}): the complement "
            "of span{x, Jx} must contain a unit vector"
        )
    for _ in range(count):
        if kind == "holomorphic":
            x = random_unit_vector(g, rng)
            y = J @ x
            planes.append(_plane(g, J, x, y))
        elif kind == "antiholomorphic":
            for attempt in range(16):
                x = random_unit_vector(g, rng)
                jx = J @ x
                v = rng.normal(size=d)
                v = v - (x @ g @ v) * x - ((jx @ g @ v) / (jx @ g @ jx)) * jx
                nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
                if nrm > 1e-8:
                    break
            else:
                raise FrameConstructionError("antiholomorphic draw degenerated")
            planes.append(_plane(g, J, x, v / nrm))
        elif kind == "random":
            pair = gram_schmidt(rng.normal(size=(2, d)), g)
            planes.append(_plane(g, J, pair[0], pair[1]))
        else:
            raise ValueError(f"unknown plane kind {kind!r}")
    return planes


def sectional_curvature(riemann: np.ndarray, g: np.ndarray, plane: Plane) -> float:
    """K = R(x,y,y,x) for the plane's orthonormal pair.

    Raises ValueError when the pair fails orthonormality at 1e-10 (the
    formula has no denominator, so it silently scales otherwise).
    """
    x, y = plane.x, plane.y
    res = max(
        abs(x @ g @ x - 1.0),
        abs(y @ g @ y - 1.0),
        abs(x @ g @ y),
    )
    if res > _ORTHO_TOL:
        raise ValueError(
            f"plane is not g-orthonormal (residual {res:.3e}); "
            "build planes through sample_planes or gram_schmidt"
        )
    return float(np.einsum("abcd,a,b,c,d->", riemann, x, y, y, x))


@dataclass(frozen=True)
class NuEstimate:
    """Sampled antiholomorphic sectional curvature at one point."""

    mean: float
    min: float
    max: float

    @property
    def spread(self) -> float:
        return self.max - self.min


def estimate_nu(
    riemann: np.ndarray,
    g: np.ndarray,
    J: np.ndarray,
    count: int,
    rng: np.random.Generator,
) -> NuEstimate:
    """Antiholomorphic sectional curvature over a random plane batch."""
    ks = [
        sectional_curvature(riemann, g, pl)
        for pl in sample_planes(g, J, "antiholomorphic", count, rng)
    ]
    return NuEstimate(float(np.mean(ks)), float(np.min(ks)), float(np.max(ks)))


def nu_from_formula(tau: jets.Jet, tau_prime: jets.Jet, n: int) -> jets.Jet:
    """ν = ((2n+1)τ − 3τ′) / (8n(n²−1)) as a jet (so x(ν) is readable).

    Defined for n >= 2; the denominator vanishes at n = 1.
    """
    if n < 2:
        raise DimensionError(f"antiholomorphic curvature formula needs n >= 2, got n={n}")
    return ((2 * n + 1) * tau - 3 * tau_prime) * (1.0 / (8 * n * (n * n - 1)))
