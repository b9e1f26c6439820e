"""Predicates and characterizations for left-invariant Hermitian structures.

Every boolean comes with the residual it was decided from.  Residuals are
Frobenius norms (l2 norms of form coefficients), so they do not depend on the
unitary frame the structure is written in.  Decisions use two bands: ``residual < tol`` is true, ``residual >= 10 tol`` is false, and the
gap in between raises :class:`Indeterminate` rather than guessing.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .engine import _cov_array_real, geometry
from .errors import Balanced, Indeterminate, NotApplicable, NotBTP
from .forms import (
    InvariantForm,
    StructureEquations,
    d,
    dbar_del_split,
    from_coefficients,
    ddbar,
    kahler_form,
    power,
    transform_structure,
    wedge,
)
from .identities import btp_identities
from .tensor_core import BARRED, DEFAULT_TOL, LOWER, UPPER, UnitaryMatrix, frob, max_abs, unitary_diagonalize_normal

FLAG_NAMES = (
    "balanced",
    "chern_flat",
    "gauduchon",
    "pluriclosed",
    "btp_direct",
    "btp_thm11",
    "bkl",
    "vaisman",
    "lcb",
    "lck",
    "lp",
    "gce",
    "degenerate_torsion",
    "bismut_abelian_certificate",
)

CASE1, CASE2, CASE3 = "Case1", "Case2", "Case3"
NOT_APPLICABLE = "NotApplicable"


def verdict(name: str, residual: float, tol: float = DEFAULT_TOL) -> bool:
    if residual < tol:
        return True
    if residual >= 10 * tol:
        return False
    raise Indeterminate(name, residual, tol)


def is_zero(name: str, value: float, tol: float) -> bool:
    return verdict(name, abs(value), tol)


# ---------------------------------------------------------------------------
# torsion-level predicates


def balanced_residual(S: StructureEquations) -> float:
    return float(np.linalg.norm(geometry(S).eta))


def is_balanced(S, tol=DEFAULT_TOL):
    r = balanced_residual(S)
    return verdict("balanced", r, tol), r


def is_chern_flat(S, tol=DEFAULT_TOL):
    R = geometry(S).chern_curvature
    r = max(frob(R.R11), frob(R.R20))
    return verdict("chern_flat", r, tol), r


def is_gauduchon(S, tol=DEFAULT_TOL):
    S.require_geometric()
    r = ddbar(S, power(kahler_form(S.n), S.n - 1)).norm()
    return verdict("gauduchon", r, tol), r


def is_pluriclosed(S, tol=DEFAULT_TOL):
    S.require_geometric()
    r = ddbar(S, kahler_form(S.n)).norm()
    return verdict("pluriclosed", r, tol), r


@dataclass(frozen=True)
class BTPResult:
    flag: bool
    residual: float
    witness: Optional[tuple[int, int, int, int]]  # (k, i, j, direction) of the largest entry


def is_btp_direct(S: StructureEquations, tol: float = DEFAULT_TOL) -> BTPResult:
    """Parallel Chern torsion under the Bismut connection (equivalent to parallel Bismut torsion)."""
    DT = geometry(S).DbT
    r = frob(DT)
    flag = verdict("btp_direct", r, tol)
    witness = None if flag else tuple(int(x) for x in np.unravel_index(np.argmax(np.abs(DT)), DT.shape))
    return BTPResult(flag, r, witness)


def bismut_torsion_parallel_residual(S: StructureEquations) -> float:
    """max |nabla^b T^b| with T^b built from the Bismut connection itself."""
    g = geometry(S)
    from .engine import hermitian_to_real

    om = hermitian_to_real(g.theta_b)
    return frob(_cov_array_real(om, g.bismut_torsion_real, (LOWER, LOWER, UPPER)))


@dataclass(frozen=True)
class CurvatureConditions:
    c1: float
    c2: float
    c3: float
    c4: float
    flag: bool

    @property
    def residuals(self) -> dict[str, float]:
        return {"c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4}


def theorem11_conditions(S: StructureEquations, tol: float = DEFAULT_TOL) -> CurvatureConditions:
    """Curvature-only characterization of parallel Bismut torsion."""
    g = geometry(S)
    R = g.bismut_curvature
    dt = g.derived
    c1 = frob(R.R20)
    c2 = frob(R.R11 - np.transpose(R.R11, (2, 3, 0, 1)))
    c3 = frob(g.nabla_b(dt.ricQ, (LOWER, BARRED)))
    c4 = frob(np.conj(dt.eta) @ dt.ricQ)
    flags = [verdict(f"curvature_condition_{i}", c, tol) for i, c in enumerate((c1, c2, c3, c4), 1)]
    return CurvatureConditions(c1, c2, c3, c4, all(flags))


def prop15_identities(S: StructureEquations, tol: float = DEFAULT_TOL) -> dict[str, float]:
    if not is_btp_direct(S, tol).flag:
        raise NotBTP(f"{S.name or 'structure'} does not have parallel Bismut torsion")
    return btp_identities(S)


# ---------------------------------------------------------------------------
# admissible frames


@dataclass(frozen=True, eq=False)
class AdmissibleFrameData:
    U: UnitaryMatrix
    lam: float
    a: np.ndarray  # length n, a[-1] == 0
    S: StructureEquations  # structure equations in the admissible coframe
    checks: dict[str, float] = field(default_factory=dict)

    @property
    def max_check(self) -> float:
        return max(self.checks.values(), default=0.0)


_ADMISSIBLE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _complete_row(v: np.ndarray) -> np.ndarray:
    """Unitary matrix whose last row is the unit vector ``v``."""
    from .tensor_core import _pivoted_gram_schmidt
    import scipy.linalg

    n = v.size
    comp = scipy.linalg.null_space(np.conj(v).reshape(1, n))
    rows = _pivoted_gram_schmidt(comp).T if n > 1 else np.zeros((0, n))
    return np.vstack([rows, v.reshape(1, n)])


def admissible_frame(S: StructureEquations, tol: float = DEFAULT_TOL) -> AdmissibleFrameData:
    cache = _ADMISSIBLE.setdefault(S, {})
    if tol in cache:
        return cache[tol]
    if not is_btp_direct(S, tol).flag:
        raise NotBTP(f"{S.name or 'structure'} does not have parallel Bismut torsion")
    eta = geometry(S).eta
    lam = float(np.linalg.norm(eta))
    if not lam >= 10 * tol:
        if lam < tol:
            raise Balanced(f"|eta| = {lam:.3e} below tolerance; structure is balanced")
        raise Indeterminate("balanced", lam, tol)
    n = S.n
    U1 = _complete_row(eta / lam)
    S1 = transform_structure(S, U1)
    phi1 = geometry(S1).derived.phi
    W, dvals = unitary_diagonalize_normal(phi1[: n - 1, : n - 1], tol)
    V = np.eye(n, dtype=complex)
    V[: n - 1, : n - 1] = W.matrix.T
    U = UnitaryMatrix(V @ U1)
    S2 = transform_structure(S, U)
    a = np.zeros(n, complex)
    a[: n - 1] = dvals / lam

    g2 = geometry(S2)
    T2 = g2.T
    tin = T2[:, :, n - 1]  # tin[j, i] = T^j_in
    checks = {
        "eta_parallel_phi_n": max(max_abs(g2.eta[: n - 1]), abs(g2.eta[n - 1] - lam)),
        "T^n_ij": max_abs(T2[n - 1]),
        "T^j_in_diagonal": max_abs(tin.T - np.diag(a)),
        "sum_a": abs(a.sum() - lam),
        # (a_i + a_k - a_j) T^j_ik
        "a_T_relation": max_abs((a[None, :, None] + a[None, None, :] - a[:, None, None]) * T2),
    }
    out = AdmissibleFrameData(U, lam, a, S2, checks)
    cache[tol] = out
    return out


def _nonbalanced_btp(S, tol) -> Optional[AdmissibleFrameData]:
    """Admissible frame data, or None when the structure is balanced or not BTP."""
    try:
        return admissible_frame(S, tol)
    except (Balanced, NotBTP):
        return None


# ---------------------------------------------------------------------------
# curvature / form predicates


def bkl_residual(S):
    g = geometry(S)
    return max(frob(g.bismut_curvature.R20), frob(g.derived.Q))


def is_bkl(S, tol=DEFAULT_TOL):
    r = bkl_residual(S)
    return verdict("bkl", r, tol), r


def _lee_sum(S) -> InvariantForm:
    eta = from_coefficients(S.n, geometry(S).eta, "p")
    return eta + eta.conj()


def lcb_residual(S):
    return d(S, _lee_sum(S)).norm()


def is_lcb(S, tol=DEFAULT_TOL):
    r = lcb_residual(S)
    return verdict("lcb", r, tol), r


def lck_shape_residual(S):
    """|T^j_ik - (eta_k delta_ij - eta_i delta_kj)/(n-1)|."""
    g = geometry(S)
    n = S.n
    I = np.eye(n)
    shape = (np.einsum("k,ij->jik", g.eta, I) - np.einsum("i,kj->jik", g.eta, I)) / (n - 1)
    return frob(g.T - shape)


def is_lck(S, tol=DEFAULT_TOL):
    r = max(lck_shape_residual(S), lcb_residual(S))
    return verdict("lck", r, tol), r


def lee_parallel_residual(S):
    """|nabla^{LC}(eta + conj eta)|."""
    g = geometry(S)
    psi = np.concatenate([g.eta, np.conj(g.eta)])
    return frob(_cov_array_real(g.omega_lc, psi, (LOWER,)))


def is_vaisman(S, tol=DEFAULT_TOL):
    """LCK with Levi-Civita parallel Lee form; Kahler metrics (eta = 0) are excluded."""
    r = max(lck_shape_residual(S), lcb_residual(S), lee_parallel_residual(S))
    flag = verdict("vaisman", r, tol)
    return flag and not is_balanced(S, tol)[0], r


def vaisman_eigenvalue_residual(S, tol=DEFAULT_TOL) -> Optional[float]:
    """|a - lambda/(n-1)| over i < n in an admissible frame; None if not non-balanced BTP."""
    adm = _nonbalanced_btp(S, tol)
    if adm is None:
        return None
    n = S.n
    return frob(adm.a[: n - 1] - adm.lam / (n - 1))


def lp_residual(S) -> tuple[float, complex]:
    """Residual of ``del eta = 0`` and ``del omega = c eta ^ del conj(eta)``, and the fitted c."""
    g = geometry(S)
    n = S.n
    eta = from_coefficients(n, g.eta, "p")
    del_eta, _ = dbar_del_split(S, eta)
    del_etabar, _ = dbar_del_split(S, eta.conj())
    rhs = wedge(eta, del_etabar)
    del_w, _ = dbar_del_split(S, kahler_form(n))
    keys = sorted(set(rhs.terms) | set(del_w.terms))
    x = np.array([rhs.terms.get(k, 0j) for k in keys])
    y = np.array([del_w.terms.get(k, 0j) for k in keys])
    c = complex(np.vdot(x, y) / np.vdot(x, x)) if np.vdot(x, x).real > 1e-28 else 0j
    fit = frob(y - c * x)
    return max(del_eta.norm(), fit), c


def is_lp(S, tol=DEFAULT_TOL):
    r, _ = lp_residual(S)
    return verdict("lp", r, tol), r


def degenerate_torsion_residual(S, tol=DEFAULT_TOL) -> Optional[float]:
    adm = _nonbalanced_btp(S, tol)
    if adm is None:
        return None
    n = S.n
    return frob(geometry(adm.S).T[:, : n - 1, : n - 1])


def has_degenerate_torsion(S, tol=DEFAULT_TOL):
    r = degenerate_torsion_residual(S, tol)
    if r is None:
        raise NotApplicable("degenerate torsion is defined for non-balanced BTP structures")
    return verdict("degenerate_torsion", r, tol), r


# ---------------------------------------------------------------------------
# threefolds, holonomy certificate, holomorphy of chi


@dataclass(frozen=True)
class ThreefoldResult:
    case: str
    s: complex
    t: complex
    a: tuple[complex, complex]


def threefold_case(S: StructureEquations, tol: float = DEFAULT_TOL) -> ThreefoldResult:
    if S.n != 3:
        raise NotApplicable(f"threefold case analysis needs n = 3, got n = {S.n}")
    try:
        adm = admissible_frame(S, tol)
    except Balanced as exc:
        raise NotApplicable(str(exc)) from exc
    a1, a2 = adm.a[0], adm.a[1]
    s = a1 * np.conj(a2) + np.conj(a1) * a2
    t = a1 * np.conj(a2) - np.conj(a1) * a2
    s_zero = is_zero("threefold.s", s, tol)
    t_zero = is_zero("threefold.t", t, tol)
    if s_zero:
        case = CASE1
    elif not t_zero:
        case = CASE2
    else:
        # a_1 conj(a_2) is real and nonzero here, so both a_i are nonzero
        case = CASE3
    return ThreefoldResult(case, complex(s), complex(t), (complex(a1), complex(a2)))


def bismut_abelian_residual(S) -> tuple[float, dict[str, float]]:
    """Largest commutator among the endomorphisms theta^b(X) and Theta^b(X, Y).

    The family is closed under adjoints (theta^b is skew-Hermitian), so it is
    simultaneously unitarily diagonalizable exactly when all commutators vanish.
    That makes the test independent of the frame the structure is written in.
    """
    g = geometry(S)
    n = S.n
    th = g.theta_b
    Th = g.curvature_array(th)
    mats = [th[:, :, a] for a in range(2 * n)]
    mats += [Th[:, :, a, b] for a in range(2 * n) for b in range(2 * n)]
    M = np.stack(mats)
    MM = np.einsum("aij,bjk->abik", M, M)
    comm = MM - np.swapaxes(MM, 0, 1)
    parts = {
        "theta_b_commutators": frob(comm[: 2 * n, : 2 * n]),
        "with_curvature": frob(comm[:, 2 * n :]),
    }
    return max(parts.values()), parts


def bismut_abelian_certificate(S, tol=DEFAULT_TOL):
    r, _ = bismut_abelian_residual(S)
    return verdict("bismut_abelian_certificate", r, tol), r


def chi_holomorphic_residual(S) -> float:
    """|nabla^c_{conj X} chi| with chi the vector field dual to eta."""
    g = geometry(S)
    n = S.n
    return frob(g.nabla_c(g.derived.chi, (UPPER,))[:, n:])


def holonomy_block_residual(S, tol=DEFAULT_TOL) -> Optional[float]:
    """Size of the last row and column of theta^b in an admissible frame."""
    adm = _nonbalanced_btp(S, tol)
    if adm is None:
        return None
    th = geometry(adm.S).theta_b
    return max(frob(th[-1]), frob(th[:, -1]))


# ---------------------------------------------------------------------------


@dataclass
class ClassificationReport:
    name: str
    n: int
    tolerance: float
    flags: dict[str, Optional[bool]]
    residuals: dict[str, Optional[float]]
    threefold_case: Optional[str] = None
    discriminants: Optional[dict[str, float]] = None
    admissible: Optional[dict] = None
    witnesses: dict[str, list] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "tolerance": self.tolerance,
            "flags": dict(self.flags),
            "residuals": dict(self.residuals),
            "threefold_case": self.threefold_case,
            "discriminants": self.discriminants,
            "admissible": self.admissible,
            "witnesses": self.witnesses,
        }


def _cx(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def classify(S: StructureEquations, tol: float = DEFAULT_TOL) -> ClassificationReport:
    S.require_geometric()
    flags: dict[str, Optional[bool]] = {}
    res: dict[str, Optional[float]] = {}

    flags["balanced"], res["balanced"] = is_balanced(S, tol)
    flags["chern_flat"], res["chern_flat"] = is_chern_flat(S, tol)
    flags["gauduchon"], res["gauduchon"] = is_gauduchon(S, tol)
    flags["pluriclosed"], res["pluriclosed"] = is_pluriclosed(S, tol)
    btp = is_btp_direct(S, tol)
    flags["btp_direct"], res["btp_direct"] = btp.flag, btp.residual
    th = theorem11_conditions(S, tol)
    flags["btp_thm11"], res["btp_thm11"] = th.flag, max(th.residuals.values())
    flags["bkl"], res["bkl"] = is_bkl(S, tol)
    flags["lcb"], res["lcb"] = is_lcb(S, tol)
    flags["lck"], res["lck"] = is_lck(S, tol)
    flags["vaisman"], res["vaisman"] = is_vaisman(S, tol)
    flags["lp"], res["lp"] = is_lp(S, tol)
    flags["gce"] = flags["lp"] and flags["btp_direct"]
    res["gce"] = max(res["lp"], res["btp_direct"])
    witnesses = {}
    if not flags["vaisman"] and res["vaisman"] < tol:
        # the shape conditions hold but eta vanishes: Kahler, not Vaisman
        witnesses["vaisman"] = ["balanced", res["balanced"]]
    if btp.witness is not None:
        witnesses["btp_direct"] = list(btp.witness)

    adm = _nonbalanced_btp(S, tol)
    r = degenerate_torsion_residual(S, tol)
    res["degenerate_torsion"] = r
    flags["degenerate_torsion"] = None if r is None else verdict("degenerate_torsion", r, tol)
    flags["bismut_abelian_certificate"], res["bismut_abelian_certificate"] = bismut_abelian_certificate(S, tol)

    case = None
    disc = None
    if S.n == 3:
        if adm is not None:
            tf = threefold_case(S, tol)
            case = tf.case
            disc = {"s_abs": abs(tf.s), "t_abs": abs(tf.t)}
        else:
            case = NOT_APPLICABLE
    adm_info = None
    if adm is not None:
        adm_info = {
            "lambda": adm.lam,
            "a": [_cx(z) for z in adm.a],
            "max_invariant_defect": adm.max_check,
        }
    return ClassificationReport(
        name=S.name, n=S.n, tolerance=tol, flags=flags, residuals=res,
        threefold_case=case, discriminants=disc, admissible=adm_info, witnesses=witnesses,
    )


# ---------------------------------------------------------------------------


@dataclass
class SweepRow:
    name: str
    btp: bool
    pluriclosed: bool
    bkl: bool
    ok: bool


@dataclass
class SweepReport:
    rows: list[SweepRow]

    @property
    def violations(self) -> list[SweepRow]:
        return [r for r in self.rows if not r.ok]


def corollary_sweep(structures: Iterable[StructureEquations], tol: float = DEFAULT_TOL) -> SweepReport:
    """Check (BTP and pluriclosed) == BKL on every structure."""
    rows = []
    for S in structures:
        btp = is_btp_direct(S, tol).flag
        pc = is_pluriclosed(S, tol)[0]
        bkl = is_bkl(S, tol)[0]
        rows.append(SweepRow(S.name, btp, pc, bkl, (btp and pc) == bkl))
    return SweepReport(rows)
