"""Identity suite: curvature identities, constancy checks, report assembly.

Every check compares two independently computed sides of an identity with
the package-wide relative residual |L−R|/(1+|L|+|R|) and aggregates the
max over sampled points and randomized argument tuples.  Arguments are
drawn from a J-adapted frame *and* random unit vectors, so frame-aligned
cancellations cannot mask a failure.

The checks, by tag:

    EQ1    R(x,y,z,u) = R(x,y,Jz,Ju) + R(x,Jy,z,Ju) + R(Jx,y,z,Ju)
    EQ2    R(x,y,z,u) = R(Jx,Jy,Jz,Ju)
    PROP3  R = ψ/6 + ν·R₁ − ((2n−1)/3)·ν·R₂   (forms as in hermitian.py)
    PROP4  (n+1)S − 3S* = ((n+1)τ − 3τ*)/(2n) · g
    PROP5  antiholomorphic K ≡ ν = ((2n+1)τ − 3τ*)/(8n(n²−1))
    EQ6    second Bianchi identity (cyclic sum of ∇R)
    EQ7    (∇_x S)(y,z) − (∇_y S)(x,z) = Σ_i (∇_{e_i} R)(x,y,z,e_i)
    EQ8    Σ_i (∇_{e_i} S)(x,e_i) = ½·x(τ)
    EQ9    Σ_i (∇_{e_i} S*)(x,e_i) = ½·x(τ*)
    EQ10   4(n−1)x(ν) = directional Ricci combination with defect terms (B)
    EQ11   the δF variant for the pair (x, Jx)
    EQ12   EQ10 with the defect terms dropped (quasi-Kähler hypotheses)
    EQ13   EQ11 reduced likewise
    LEMMA  (n+1)τ − 3τ* agrees across sampled points
    SCHUR  ν, τ, τ* agree across sampled points

Each identity carries its hypothesis class; on manifolds outside the
class the tag is reported as skipped with the reason, never as failed.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import hermitian, planes
from .errors import CurvlabError, FrameConstructionError, HypothesisNotMetError
from .geometry import (
    ManifoldSpec,
    PointGeometry,
    metric_symmetry_residual,
    metric_positive_definite,
    sample_points,
)
from .hermitian import (
    ClassificationReport,
    HermitianData,
    classify_point,
    kaehler_curvature_form,
    merge_classifications,
    metric_curvature_form,
    relative_residual,
    ricci_curvature_form,
)
from .jets import Jet
from .planes import AdaptedFrame, NuEstimate, adapted_frame, nu_from_formula

IDENTITY_TAGS = (
    "EQ1", "EQ2", "PROP3", "PROP4", "PROP5", "EQ6", "EQ7", "EQ8", "EQ9",
    "EQ10", "EQ11", "EQ12", "EQ13", "LEMMA", "SCHUR",
)

# structural residual beyond which J is not accepted as an almost-complex
# structure compatible with g (true structures sit at rounding level)
VALIDATION_TOL = 1e-8

# a manifold counts as having pointwise constant antiholomorphic curvature
# when every sampled plane batch has spread within this factor of the check
# tolerance
NU_GATE_FACTOR = 100.0


@dataclass(frozen=True)
class CheckConfig:
    points: int = 8
    planes: int = 32
    vectors: int = 32
    seed: int = 0
    tol: float = 1e-6

    def __post_init__(self):
        if min(self.points, self.planes, self.vectors) < 1:
            raise ValueError("points, planes and vectors must all be >= 1")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")

    def to_dict(self) -> dict:
        return {
            "points": self.points,
            "planes": self.planes,
            "vectors": self.vectors,
            "seed": self.seed,
            "tol": self.tol,
        }


@dataclass(frozen=True)
class IdentityResult:
    tag: str
    max_residual: float
    samples: int
    tolerance: float
    hypothesis_note: str

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "max_residual": self.max_residual,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "hypothesis_note": self.hypothesis_note,
        }


@dataclass(frozen=True)
class SchurStatistics:
    """Per-point scalar statistics and their spreads (max − min)."""

    nu_formula: list[float]
    nu_sampled: list[float]
    tau: list[float]
    tau_star: list[float]
    lemma_combination: list[float]  # (n+1)τ − 3τ*
    tolerance: float
    warnings: list[str] = field(default_factory=list)

    @staticmethod
    def _spread(values: list[float]) -> float:
        return (max(values) - min(values)) if values else 0.0

    @property
    def spreads(self) -> dict:
        return {
            "nu_formula": self._spread(self.nu_formula),
            "nu_sampled": self._spread(self.nu_sampled),
            "tau": self._spread(self.tau),
            "tau_star": self._spread(self.tau_star),
            "lemma_combination": self._spread(self.lemma_combination),
        }

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.spreads.values())

    def to_dict(self) -> dict:
        return {
            "nu_formula": list(self.nu_formula),
            "nu_sampled": list(self.nu_sampled),
            "tau": list(self.tau),
            "tau_star": list(self.tau_star),
            "lemma_combination": list(self.lemma_combination),
            "spreads": self.spreads,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# per-point bundle


@dataclass
class PointData:
    pg: PointGeometry
    hd: HermitianData | None
    frame: AdaptedFrame | None  # J-adapted when J present, else orthonormal rows
    frame_rows: np.ndarray
    nu_est: NuEstimate | None
    nu_jet: Jet | None  # formula route, needs J and n >= 2

    @property
    def lemma_value(self) -> float:
        n = self.pg.spec.n
        return (n + 1) * self.pg.scalar_curvature - 3.0 * self.hd.star_scalar


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


_PURPOSE_POINTS = 100
_PURPOSE_FRAME = 0
_PURPOSE_NU = 1
_PURPOSE_CLASSIFY = 2
_PURPOSE_TAG = 10  # + tag index


def _point_data(spec: ManifoldSpec, point: np.ndarray, idx: int, config: CheckConfig) -> PointData:
    pg = PointGeometry(spec, point)
    hd: HermitianData | None = None
    frame = None
    nu_est = None
    nu_jet = None
    if spec.complex_structure is not None:
        hd = HermitianData(pg)
        structural = max(
            hd.j_squared_residual,
            hd.compatibility_residual,
            hd.j_low_antisymmetry_residual,
        )
        if structural <= VALIDATION_TOL:
            frame = adapted_frame(pg.g, hd.J, _rng(config.seed, _PURPOSE_FRAME, idx))
            if spec.dim >= 4:
                nu_est = planes.estimate_nu(
                    pg.riemann, pg.g, hd.J, config.planes,
                    _rng(config.seed, _PURPOSE_NU, idx),
                )
            if spec.n >= 2:
                nu_jet = nu_from_formula(
                    pg.scalar_curvature_jet, hd.star_scalar_jet, spec.n
                )
    if frame is not None:
        frame_rows = frame.vectors
    else:
        frame_rows = planes.orthonormal_frame(pg.g, _rng(config.seed, _PURPOSE_FRAME, idx))
    return PointData(pg, hd, frame, frame_rows, nu_est, nu_jet)


class _Pool:
    """Argument source mixing adapted-frame rows with random unit vectors."""

    def __init__(self, pd: PointData, rng: np.random.Generator):
        self.pd = pd
        self.rng = rng

    def unit(self) -> np.ndarray:
        rows = self.pd.frame_rows
        if self.rng.random() < 0.5:
            return rows[self.rng.integers(0, rows.shape[0])]
        return planes.random_unit_vector(self.pd.pg.g, self.rng)

    def admissible_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit orthogonal (x, y) with x ⊥ Jy, for the directional checks."""
        g, J = self.pd.pg.g, self.pd.hd.J
        for _ in range(16):
            y = self.unit()
            jy = J @ y
            v = planes.random_unit_vector(g, self.rng)
            v = v - (y @ g @ v) * y - ((jy @ g @ v) / (jy @ g @ jy)) * jy
            nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
            if nrm > 1e-8:
                return v / nrm, y
        raise FrameConstructionError("admissible pair draw degenerated")


# ---------------------------------------------------------------------------
# identity evaluators: (PointData, pool, count, n) -> list of residuals


def _eval_eq1(pd: PointData, pool: _Pool, count: int) -> list[float]:
    J = pd.hd.J
    return [
        hermitian.three_term_residual(
            pd.pg, J, pool.unit(), pool.unit(), pool.unit(), pool.unit()
        )
        for _ in range(count)
    ]


def _eval_eq2(pd: PointData, pool: _Pool, count: int) -> list[float]:
    J = pd.hd.J
    return [
        hermitian.j_invariance_residual(
            pd.pg, J, pool.unit(), pool.unit(), pool.unit(), pool.unit()
        )
        for _ in range(count)
    ]


def _eval_prop3(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg, hd = pd.pg, pd.hd
    g, J, S = pg.g, hd.J, pg.ricci
    n = pg.spec.n
    nu = pd.nu_jet.value
    out = []
    for _ in range(count):
        x, y, z, u = (pool.unit() for _ in range(4))
        lhs = pg.curvature(x, y, z, u)
        rhs = (
            ricci_curvature_form(g, J, S, x, y, z, u) / 6.0
            + nu * metric_curvature_form(g, x, y, z, u)
            - ((2 * n - 1) / 3.0) * nu * kaehler_curvature_form(g, J, x, y, z, u)
        )
        out.append(relative_residual(lhs, rhs))
    return out


def _eval_prop4(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg, hd = pd.pg, pd.hd
    n = pg.spec.n
    coeff = ((n + 1) * pg.scalar_curvature - 3.0 * hd.star_scalar) / (2.0 * n)
    out = []
    for _ in range(count):
        x, y = pool.unit(), pool.unit()
        lhs = (n + 1) * float(x @ pg.ricci @ y) - 3.0 * float(x @ hd.ricci_star @ y)
        rhs = coeff * pg.inner(x, y)
        out.append(relative_residual(lhs, rhs))
    return out


def _eval_prop5(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg, hd = pd.pg, pd.hd
    nu = pd.nu_jet.value
    batch = planes.sample_planes(pg.g, hd.J, "antiholomorphic", count, pool.rng)
    return [
        relative_residual(planes.sectional_curvature(pg.riemann, pg.g, pl), nu)
        for pl in batch
    ]


def _eval_eq6(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg = pd.pg
    out = []
    for _ in range(count):
        w, x, y, z, u = (pool.unit() for _ in range(5))
        lhs = (
            pg.nabla_curvature(w, x, y, z, u)
            + pg.nabla_curvature(x, y, w, z, u)
            + pg.nabla_curvature(y, w, x, z, u)
        )
        out.append(relative_residual(lhs, 0.0))
    return out


def _eval_eq7(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg = pd.pg
    out = []
    for _ in range(count):
        x, y, z = pool.unit(), pool.unit(), pool.unit()
        lhs = pg.nabla_ricci_at(x, y, z) - pg.nabla_ricci_at(y, x, z)
        rhs = float(
            np.einsum("mabcd,a,b,c,md->", pg.nabla_riemann, x, y, z, pg.g_inv)
        )
        out.append(relative_residual(lhs, rhs))
    return out


def _eval_eq8(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg = pd.pg
    out = []
    for _ in range(count):
        x = pool.unit()
        lhs = float(np.einsum("mab,mb,a->", pg.nabla_ricci, pg.g_inv, x))
        rhs = 0.5 * pg.scalar_curvature_jet.directional(x)
        out.append(relative_residual(lhs, rhs))
    return out


def _eval_eq9(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg, hd = pd.pg, pd.hd
    out = []
    for _ in range(count):
        x = pool.unit()
        lhs = float(np.einsum("mab,mb,a->", hd.nabla_ricci_star, pg.g_inv, x))
        rhs = 0.5 * hd.star_scalar_jet.directional(x)
        out.append(relative_residual(lhs, rhs))
    return out


def _directional_combination(pd: PointData, x: np.ndarray, y: np.ndarray) -> float:
    """(∇_x S)(y,y) + (∇_x S)(Jy,Jy) − (∇_y S)(x,y) − (∇_{Jy} S)(x,Jy)."""
    pg, hd = pd.pg, pd.hd
    jy = hd.J @ y
    return (
        pg.nabla_ricci_at(x, y, y)
        + pg.nabla_ricci_at(x, jy, jy)
        - pg.nabla_ricci_at(y, x, y)
        - pg.nabla_ricci_at(jy, x, jy)
    )


def _eval_eq10(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg, hd = pd.pg, pd.hd
    n = pg.spec.n
    nu = pd.nu_jet.value
    S = pg.ricci
    out = []
    for _ in range(count):
        x, y = pool.admissible_pair()
        jby = hd.J @ hd.nk_defect(y)
        g_jby_x = pg.inner(jby, x)
        lhs = 4.0 * (n - 1) * pd.nu_jet.directional(x)
        rhs = (
            _directional_combination(pd, x, y)
            - float(jby @ S @ x)
            - g_jby_x * float(y @ S @ y)
            + 2.0 * (2 * n - 1) * nu * g_jby_x
        )
        out.append(relative_residual(lhs, rhs))
    return out


def _eval_eq11(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg, hd = pd.pg, pd.hd
    n = pg.spec.n
    nu = pd.nu_jet.value
    S = pg.ricci
    out = []
    for _ in range(count):
        x = pool.unit()
        jx = hd.J @ x
        lhs = pg.nabla_ricci_at(x, jx, jx) - pg.nabla_ricci_at(jx, x, jx)
        frame_trace = float(
            np.einsum("ab,maj,j,mb->", S, hd.nabla_J, jx, pg.g_inv)
        )
        g_df_jx = pg.inner(hd.delta_F, jx)
        rhs = (
            0.5
            * (
                0.5 * pg.scalar_curvature_jet.directional(x)
                - frame_trace
                + g_df_jx * float(x @ S @ x)
                + pg.nabla_ricci_at(x, jx, jx)
                + float(hd.nabla_J_apply(x, x) @ S @ jx)
            )
            - 2.0 * (n - 1) * pd.nu_jet.directional(x)
            - (2 * n - 1) * nu * g_df_jx
        )
        out.append(relative_residual(lhs, rhs))
    return out


def _eval_eq12(pd: PointData, pool: _Pool, count: int) -> list[float]:
    n = pd.pg.spec.n
    out = []
    for _ in range(count):
        x, y = pool.admissible_pair()
        lhs = 4.0 * (n - 1) * pd.nu_jet.directional(x)
        rhs = _directional_combination(pd, x, y)
        out.append(relative_residual(lhs, rhs))
    return out


def _eval_eq13(pd: PointData, pool: _Pool, count: int) -> list[float]:
    pg, hd = pd.pg, pd.hd
    n = pg.spec.n
    out = []
    for _ in range(count):
        x = pool.unit()
        jx = hd.J @ x
        lhs = 4.0 * (n - 1) * pd.nu_jet.directional(x)
        rhs = (
            0.5 * pg.scalar_curvature_jet.directional(x)
            - pg.nabla_ricci_at(x, jx, jx)
            + pg.nabla_ricci_at(jx, x, jx)
        )
        out.append(relative_residual(lhs, rhs))
    return out


_EVALUATORS = {
    "EQ1": _eval_eq1,
    "EQ2": _eval_eq2,
    "PROP3": _eval_prop3,
    "PROP4": _eval_prop4,
    "PROP5": _eval_prop5,
    "EQ6": _eval_eq6,
    "EQ7": _eval_eq7,
    "EQ8": _eval_eq8,
    "EQ9": _eval_eq9,
    "EQ10": _eval_eq10,
    "EQ11": _eval_eq11,
    "EQ12": _eval_eq12,
    "EQ13": _eval_eq13,
}


# ---------------------------------------------------------------------------
# session


class Session:
    """Shared state for a batch of checks on one manifold: sampled points,
    per-point geometry, classification, and applicability gates."""

    def __init__(self, spec: ManifoldSpec, config: CheckConfig):
        self.spec = spec
        self.config = config
        self.points = sample_points(
            spec, config.points, _rng(config.seed, _PURPOSE_POINTS)
        )

        sym = max(float(metric_symmetry_residual(spec, p)) for p in self.points)
        pos = all(metric_positive_definite(spec, p) for p in self.points)
        self.metric_ok = sym <= VALIDATION_TOL and pos
        self.validation = {
            "metric_symmetry": sym,
            "positive_definite": pos,
            "j_squared": None,
            "compatibility": None,
            "j_low_antisymmetry": None,
        }

        self.data: list[PointData] = []
        if self.metric_ok:
            workers = _worker_count(config.points)
            ids = range(config.points)
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    self.data = list(
                        pool.map(
                            lambda i: _point_data(spec, self.points[i], i, config), ids
                        )
                    )
            else:
                self.data = [_point_data(spec, self.points[i], i, config) for i in ids]
        if self.data and self.data[0].hd is not None:
            for key, attr in (
                ("j_squared", "j_squared_residual"),
                ("compatibility", "compatibility_residual"),
                ("j_low_antisymmetry", "j_low_antisymmetry_residual"),
            ):
                self.validation[key] = max(getattr(pd.hd, attr) for pd in self.data)
        self.validation["ok"] = self.metric_ok and all(
            self.validation[k] is None or self.validation[k] <= VALIDATION_TOL
            for k in ("j_squared", "compatibility", "j_low_antisymmetry")
        )

        self.classification: ClassificationReport | None = None
        if self.j_valid:
            per_point = [
                classify_point(
                    pd.hd,
                    config.vectors,
                    _rng(config.seed, _PURPOSE_CLASSIFY, i),
                    config.tol,
                )
                for i, pd in enumerate(self.data)
            ]
            self.classification = merge_classifications(per_point, config.tol)

        self.nu_spread = (
            max(pd.nu_est.spread for pd in self.data)
            if self.j_valid and all(pd.nu_est is not None for pd in self.data)
            else None
        )

    # -- validation / gates

    @property
    def has_j(self) -> bool:
        return self.spec.complex_structure is not None

    @property
    def j_valid(self) -> bool:
        return (
            self.has_j
            and self.validation["ok"]
            and self.validation["j_squared"] is not None
        )

    @property
    def pointwise_constant_nu(self) -> bool | None:
        if self.nu_spread is None:
            return None
        return self.nu_spread <= NU_GATE_FACTOR * self.config.tol

    def _class_ok(self, name: str) -> bool:
        return self.classification is not None and self.classification[name].passed

    def _gate(self, tag: str) -> tuple[bool, str]:
        """(applicable, reason-or-note).  The note doubles as the
        hypothesis_note on success and the skip reason on failure."""
        if not self.metric_ok:
            return False, (
                "metric failed validation (asymmetric or not positive definite "
                "at a sampled point)"
            )
        if tag in ("EQ6", "EQ7", "EQ8"):
            return True, "purely Riemannian (Bianchi family); no hypothesis"
        if not self.has_j:
            return False, "no almost-complex structure on this manifold"
        if not self.j_valid:
            return False, (
                "almost-complex structure failed validation "
                f"(worst structural residual {self._worst_structural():.3e})"
            )
        qk = self._class_ok("quasi_kaehler") or self._class_ok("nearly_kaehler")
        qk2 = self._class_ok("qk2")
        ah3 = self._class_ok("ah3")
        const_nu = self.pointwise_constant_nu
        n = self.spec.n

        def need_const_nu(base: str) -> tuple[bool, str] | None:
            if self.spec.dim < 4:
                return False, f"{base}: needs dim >= 4 (antiholomorphic planes)"
            if const_nu is None:
                return False, f"{base}: antiholomorphic curvature unavailable"
            if not const_nu:
                return False, (
                    f"{base}: antiholomorphic curvature is not pointwise constant "
                    f"(max plane-batch spread {self.nu_spread:.3e} exceeds "
                    f"{NU_GATE_FACTOR:g} x tol)"
                )
            return None

        if tag in ("EQ1", "EQ2"):
            if not qk:
                return False, (
                    "requires the quasi-Kähler class (or nearly Kähler); "
                    "classification residual above tolerance"
                )
            note = (
                "holds on the quasi-Kähler curvature class by definition"
                if tag == "EQ1"
                else "J-invariance of R; implied by the three-term identity"
            )
            return True, note
        if tag in ("PROP3", "PROP4", "PROP5"):
            if not ah3:
                return False, "requires the J-invariant-curvature class"
            blocked = need_const_nu("requires pointwise constant antiholomorphic curvature")
            if blocked:
                return blocked
            return True, (
                "J-invariant curvature + pointwise constant antiholomorphic "
                f"curvature (max plane-batch spread {self.nu_spread:.3e})"
            )
        if tag == "EQ9":
            if not qk2:
                return False, "requires the quasi-Kähler class with the three-term identity"
            return True, "star-scalar analogue of the contracted Bianchi identity"
        if tag in ("EQ10", "EQ11", "EQ12", "EQ13"):
            hypothesis = (
                ah3 if tag in ("EQ10", "EQ11") else qk2
            )
            hyp_name = (
                "J-invariant-curvature class"
                if tag in ("EQ10", "EQ11")
                else "quasi-Kähler class with the three-term identity"
            )
            if not hypothesis:
                return False, f"requires the {hyp_name}"
            blocked = need_const_nu("requires pointwise constant antiholomorphic curvature")
            if blocked:
                return blocked
            if n < 2:
                return False, "x(ν) needs n >= 2 (formula denominator)"
            note = f"directional-derivative identity under the {hyp_name} + constant-ν hypotheses"
            if tag in ("EQ10", "EQ11"):
                note += (
                    "; defect-term grouping ambiguous in general — B and δF "
                    "vanish on every shipped model"
                )
            if tag in ("EQ12", "EQ13") and n < 3:
                note += "; n < 3: outside the constancy theorem's range, checked anyway"
            return True, note
        if tag == "LEMMA":
            if not qk2:
                return False, "requires the quasi-Kähler class with the three-term identity"
            blocked = need_const_nu("requires pointwise constant antiholomorphic curvature")
            if blocked:
                return blocked
            if n < 2:
                return False, "stated for n >= 2"
            return True, "(n+1)τ − 3τ* constant across points"
        if tag == "SCHUR":
            if not qk2:
                return False, "requires the quasi-Kähler class with the three-term identity"
            blocked = need_const_nu("requires pointwise constant antiholomorphic curvature")
            if blocked:
                return blocked
            note = "global constancy of ν, τ, τ*"
            if n < 3:
                note += "; n < 3: below the constancy theorem's range, checked anyway"
            return True, note
        raise ValueError(f"unknown identity tag {tag!r}")

    def _worst_structural(self) -> float:
        vals = [
            self.validation[k]
            for k in ("j_squared", "compatibility", "j_low_antisymmetry")
            if self.validation[k] is not None
        ]
        return max(vals) if vals else float("nan")

    # -- checks

    def identity(self, tag: str) -> IdentityResult:
        if tag not in IDENTITY_TAGS:
            raise ValueError(f"unknown identity tag {tag!r}; known: {', '.join(IDENTITY_TAGS)}")
        ok, note = self._gate(tag)
        if not ok:
            raise HypothesisNotMetError(f"{tag} not applicable: {note}", missing=note)
        cfg = self.config
        if tag == "LEMMA":
            values = [pd.lemma_value for pd in self.data]
            res = max(
                (
                    relative_residual(a, b)
                    for i, a in enumerate(values)
                    for b in values[i + 1:]
                ),
                default=0.0,
            )
            return IdentityResult(tag, res, len(values), cfg.tol, note)
        if tag == "SCHUR":
            stats = self.schur()
            res = max(
                spread / (1.0 + abs(np.mean(vals))) if vals else 0.0
                for spread, vals in (
                    (stats.spreads["nu_formula"], stats.nu_formula),
                    (stats.spreads["tau"], stats.tau),
                    (stats.spreads["tau_star"], stats.tau_star),
                )
            )
            return IdentityResult(tag, res, len(stats.tau), cfg.tol, note)
        evaluator = _EVALUATORS[tag]
        tag_idx = IDENTITY_TAGS.index(tag)
        worst = 0.0
        samples = 0
        for i, pd in enumerate(self.data):
            pool = _Pool(pd, _rng(cfg.seed, _PURPOSE_TAG + tag_idx, i))
            residuals = evaluator(pd, pool, cfg.vectors)
            samples += len(residuals)
            worst = max(worst, max(residuals))
        return IdentityResult(tag, worst, samples, cfg.tol, note)

    def schur(self) -> SchurStatistics:
        ok, note = self._gate("SCHUR")
        if not ok:
            raise HypothesisNotMetError(f"SCHUR not applicable: {note}", missing=note)
        warnings = []
        if self.spec.n < 3:
            warnings.append(
                "n < 3: the ν-constancy statement is outside its stated range"
            )
        if self.spec.n < 2:
            warnings.append("n < 2: the (n+1)τ−3τ* statement is outside its stated range")
        return SchurStatistics(
            nu_formula=[pd.nu_jet.value for pd in self.data],
            nu_sampled=[pd.nu_est.mean for pd in self.data],
            tau=[pd.pg.scalar_curvature for pd in self.data],
            tau_star=[pd.hd.star_scalar for pd in self.data],
            lemma_combination=[pd.lemma_value for pd in self.data],
            tolerance=self.config.tol,
            warnings=warnings,
        )


def _worker_count(points: int) -> int:
    env = os.environ.get("CURVLAB_THREADS", "").strip()
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise CurvlabError(f"CURVLAB_THREADS must be an integer, got {env!r}") from None
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, points, 8))


# ---------------------------------------------------------------------------
# public entry points


def check_identity(
    spec: ManifoldSpec,
    tag: str,
    points: int = 8,
    vectors_per_point: int = 32,
    seed: int = 0,
    tol: float = 1e-6,
) -> IdentityResult:
    """Run one identity check; raises HypothesisNotMetError when the
    manifold is outside the identity's hypothesis class."""
    config = CheckConfig(points=points, vectors=vectors_per_point, seed=seed, tol=tol)
    return Session(spec, config).identity(tag)


def schur_check(
    spec: ManifoldSpec, points: int = 8, seed: int = 0, tol: float = 1e-6
) -> SchurStatistics:
    config = CheckConfig(points=points, seed=seed, tol=tol)
    return Session(spec, config).schur()


@dataclass(frozen=True)
class Report:
    manifold: dict
    config: dict
    validation: dict
    classification: dict
    identities: list[IdentityResult]
    schur: SchurStatistics | None
    skipped: list[dict]

    @property
    def passed(self) -> bool:
        return (
            bool(self.validation["ok"])
            and all(r.passed for r in self.identities)
            and (self.schur is None or self.schur.passed)
        )

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold,
            "config": self.config,
            "validation": self.validation,
            "classification": self.classification,
            "identities": [r.to_dict() for r in self.identities],
            "schur": self.schur.to_dict() if self.schur is not None else None,
            "skipped": self.skipped,
            "pass": self.passed,
        }


def full_report(spec: ManifoldSpec, config: CheckConfig, suite: str = "all") -> Report:
    """Classification + applicable identities + constancy statistics.

    ``suite`` selects a subset: 'class', 'identities', 'schur', 'all', or a
    single identity tag.  Inapplicable tags land in ``skipped`` with the
    unmet hypothesis; a failed applicable check is reported, not raised.
    """
    session = Session(spec, config)
    want_class = suite in ("class", "all")
    if suite in ("identities", "all"):
        tags = [t for t in IDENTITY_TAGS if t != "SCHUR"]
    elif suite in ("class", "schur"):
        tags = []
    else:
        tags = [suite] if suite in IDENTITY_TAGS else None
        if tags is None:
            raise ValueError(
                f"unknown suite {suite!r}: expected class, identities, schur, "
                "all, or an identity tag"
            )
    want_schur = suite in ("schur", "all", "SCHUR")
    if suite == "SCHUR":
        tags = []

    identities: list[IdentityResult] = []
    skipped: list[dict] = []
    for tag in tags:
        try:
            identities.append(session.identity(tag))
        except HypothesisNotMetError as err:
            skipped.append({"tag": tag, "reason": err.missing})

    schur_stats = None
    if want_schur:
        try:
            schur_stats = session.schur()
        except HypothesisNotMetError as err:
            skipped.append({"tag": "SCHUR", "reason": err.missing})

    classification = {}
    if want_class:
        if session.classification is not None:
            classification = {
                name: {"residual": res.residual, "pass": res.passed, "status": res.status}
                for name, res in session.classification.items()
            }
        else:
            reason = (
                "no almost-complex structure on this manifold"
                if not session.has_j
                else "almost-complex structure failed validation"
            )
            skipped.append({"tag": "CLASSIFICATION", "reason": reason})

    manifold = {
        "name": spec.name,
        "dim": spec.dim,
        "params": {k: spec.params[k] for k in sorted(spec.params)},
    }
    config_dict = dict(config.to_dict(), suite=suite)
    return Report(
        manifold=manifold,
        config=config_dict,
        validation=session.validation,
        classification=classification,
        identities=identities,
        schur=schur_stats,
        skipped=skipped,
    )
