"""Left-invariant forms on a Lie group with a unitary coframe.

Generators are numbered ``0..n-1`` for ``phi_1..phi_n`` and ``n..2n-1`` for
their conjugates.  A form is a sparse map from strictly increasing generator
tuples to complex coefficients.  ``d`` is induced by the structure constants
stored in :class:`StructureEquations` and the graded Leibniz rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionMismatch, MixedBidegree, NotValidated
from .tensor_core import MAX_DIM, as_complex_array, max_abs

DROP_TOL = 1e-14
D2_TOL = 1e-10

TERM_TYPES = ("pp", "pm", "mm")


def _canonical(mono: Iterable[int]):
    """Sort a generator word; returns (sign, key) or (0, None) on repetition."""
    word = list(mono)
    if len(set(word)) != len(word):
        return 0, None
    sign = 1
    # insertion sort counting transpositions; words are short
    for i in range(1, len(word)):
        j = i
        while j > 0 and word[j - 1] > word[j]:
            word[j - 1], word[j] = word[j], word[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(word)


@dataclass(frozen=True, eq=False)
class InvariantForm:
    n: int
    terms: Mapping[tuple[int, ...], complex]

    @classmethod
    def make(cls, n: int, raw: Mapping[tuple[int, ...], complex] | Iterable) -> "InvariantForm":
        items = raw.items() if isinstance(raw, Mapping) else raw
        acc: dict[tuple[int, ...], complex] = {}
        for mono, c in items:
            sign, key = _canonical(mono)
            if sign == 0:
                continue
            acc[key] = acc.get(key, 0.0) + sign * complex(c)
        clean = {k: v for k, v in acc.items() if abs(v) > DROP_TOL}
        return cls(n, clean)

    @classmethod
    def zero(cls, n: int) -> "InvariantForm":
        return cls(n, {})

    @classmethod
    def scalar(cls, n: int, c: complex) -> "InvariantForm":
        return cls.make(n, {(): c})

    # --- inspection -------------------------------------------------------

    @property
    def degree(self) -> int:
        degs = {len(k) for k in self.terms}
        if len(degs) > 1:
            raise ValueError(f"form is not homogeneous: degrees {sorted(degs)}")
        return degs.pop() if degs else 0

    def bidegrees(self) -> set[tuple[int, int]]:
        return {_bidegree(k, self.n) for k in self.terms}

    def bidegree(self) -> tuple[int, int] | None:
        """The unique bidegree, or None for the zero form."""
        bd = self.bidegrees()
        if not bd:
            return None
        if len(bd) > 1:
            raise MixedBidegree(f"form has several bidegrees {sorted(bd)}")
        return bd.pop()

    def part(self, p: int, q: int) -> "InvariantForm":
        return InvariantForm(
            self.n, {k: v for k, v in self.terms.items() if _bidegree(k, self.n) == (p, q)}
        )

    def coefficient(self, mono: Iterable[int]) -> complex:
        sign, key = _canonical(mono)
        if sign == 0:
            return 0j
        return sign * self.terms.get(key, 0j)

    def max_abs(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def norm(self) -> float:
        """l2 norm of the canonical coefficients; unchanged by unitary frame changes."""
        return float(np.sqrt(sum(abs(v) ** 2 for v in self.terms.values())))

    def is_zero(self, tol: float = DROP_TOL) -> bool:
        return self.max_abs() <= tol

    # --- algebra -----------------------------------------------------------

    def _check(self, other: "InvariantForm"):
        if self.n != other.n:
            raise DimensionMismatch(f"forms over n={self.n} and n={other.n}")

    def __add__(self, other: "InvariantForm") -> "InvariantForm":
        self._check(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0.0) + v
        return InvariantForm(self.n, {k: v for k, v in acc.items() if abs(v) > DROP_TOL})

    def __neg__(self) -> "InvariantForm":
        return InvariantForm(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "InvariantForm") -> "InvariantForm":
        return self + (-other)

    def __mul__(self, c) -> "InvariantForm":
        c = complex(c)
        return InvariantForm(
            self.n, {k: c * v for k, v in self.terms.items() if abs(c * v) > DROP_TOL}
        )

    __rmul__ = __mul__

    def conj(self) -> "InvariantForm":
        n = self.n
        return InvariantForm.make(
            n, [(tuple(g + n if g < n else g - n for g in k), np.conj(v)) for k, v in self.terms.items()]
        )

    def __xor__(self, other: "InvariantForm") -> "InvariantForm":
        return wedge(self, other)

    def __repr__(self):
        if not self.terms:
            return f"InvariantForm(n={self.n}, 0)"
        parts = [f"({v:.6g}){_mono_name(k, self.n)}" for k, v in sorted(self.terms.items())]
        return f"InvariantForm(n={self.n}, " + " + ".join(parts) + ")"


def _bidegree(mono: tuple[int, ...], n: int) -> tuple[int, int]:
    p = sum(1 for g in mono if g < n)
    return p, len(mono) - p


def _mono_name(mono, n):
    if not mono:
        return "1"
    return "^".join(f"p{g + 1}" if g < n else f"pb{g - n + 1}" for g in mono)


def wedge(a: InvariantForm, b: InvariantForm) -> InvariantForm:
    a._check(b)
    raw = []
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            raw.append((ka + kb, va * vb))
    return InvariantForm.make(a.n, raw)


def phi(n: int, i: int) -> InvariantForm:
    """The (1,0) generator phi_{i+1} (0-based index)."""
    return InvariantForm(n, {(i,): 1.0 + 0j})


def phibar(n: int, i: int) -> InvariantForm:
    return InvariantForm(n, {(n + i,): 1.0 + 0j})


def kahler_form(n: int) -> InvariantForm:
    """omega = sqrt(-1) sum_i phi_i ^ conj(phi_i)."""
    return InvariantForm.make(n, {(i, n + i): 1j for i in range(n)})


def power(a: InvariantForm, k: int) -> InvariantForm:
    out = InvariantForm.scalar(a.n, 1.0)
    for _ in range(k):
        out = wedge(out, a)
    return out


def from_coefficients(n: int, coeffs, slots: str) -> InvariantForm:
    """Build ``sum c[idx] psi_{idx_0} ^ psi_{idx_1} ^ ...``.

    ``slots`` has one character per axis: ``'p'`` for phi, ``'b'`` for
    conj(phi).  No symmetrisation factor is applied.
    """
    coeffs = np.asarray(coeffs)
    if coeffs.ndim != len(slots):
        raise DimensionMismatch("slots do not match coefficient rank")
    shift = [0 if s == "p" else n for s in slots]
    raw = []
    for idx in zip(*np.nonzero(np.abs(coeffs) > DROP_TOL)):
        raw.append((tuple(int(i) + s for i, s in zip(idx, shift)), coeffs[idx]))
    return InvariantForm.make(n, raw)


def one_form(n: int, coeffs10, coeffs01=None) -> InvariantForm:
    """sum a_i phi_i + sum b_i conj(phi_i)."""
    f = from_coefficients(n, coeffs10, "p")
    if coeffs01 is not None:
        f = f + from_coefficients(n, coeffs01, "b")
    return f


def form_to_array(a: InvariantForm) -> np.ndarray:
    """Fully antisymmetric coefficient array over 2n generators (degree 2 only).

    ``arr[g, h]`` equals the form evaluated on the dual vectors of g and h.
    """
    n = a.n
    arr = np.zeros((2 * n, 2 * n), complex)
    for k, v in a.terms.items():
        if len(k) != 2:
            raise ValueError("form_to_array handles 2-forms only")
        arr[k[0], k[1]] += v
        arr[k[1], k[0]] -= v
    return arr


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    d2_residual: float
    worst_generator: int | None
    integrable: bool
    g_max: float

    @property
    def passed(self) -> bool:
        return self.d2_residual < D2_TOL


@dataclass(frozen=True, eq=False)
class StructureEquations:
    """Complex structure constants of a unitary left-invariant coframe.

    ``d phi_k = sum_{i<j} E[k,i,j] phi_i^phi_j + sum_{i,j} F[k,i,j] phi_i^conj(phi_j)
    + sum_{i<j} G[k,i,j] conj(phi_i)^conj(phi_j)``.  ``E`` and ``G`` are stored
    fully antisymmetric in the last two indices.
    """

    n: int
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    name: str = ""

    def __post_init__(self):
        n = int(self.n)
        if not 2 <= n <= MAX_DIM:
            raise DimensionMismatch(f"n must be in 2..{MAX_DIM}, got {n}")
        arrs = {}
        for key in ("E", "F", "G"):
            a = as_complex_array(getattr(self, key))
            if a.shape != (n, n, n):
                raise DimensionMismatch(f"{key} has shape {a.shape}, expected {(n, n, n)}")
            if key in ("E", "G"):
                a = 0.5 * (a - np.swapaxes(a, 1, 2))
            a = a.copy()
            a.setflags(write=False)
            arrs[key] = a
        object.__setattr__(self, "n", n)
        for key, a in arrs.items():
            object.__setattr__(self, key, a)

    # --- construction -----------------------------------------------------

    @classmethod
    def from_terms(cls, n: int, terms, name: str = "") -> "StructureEquations":
        """Terms are ``(k, type, i, j, coeff)`` with 0-based indices.

        For ``pp``/``mm`` the coefficient multiplies ``psi_i ^ psi_j``; passing
        ``i > j`` is allowed and flips the sign.  Duplicates are summed.
        """
        E = np.zeros((n, n, n), complex)
        F = np.zeros((n, n, n), complex)
        G = np.zeros((n, n, n), complex)
        for k, typ, i, j, c in terms:
            if typ == "pm":
                F[k, i, j] += c
            elif typ in ("pp", "mm"):
                if i == j:
                    raise ValueError(f"{typ} term needs i != j")
                tgt = E if typ == "pp" else G
                tgt[k, i, j] += c
                tgt[k, j, i] -= c
            else:
                raise ValueError(f"unknown term type {typ!r}")
        return cls(n, E, F, G, name)

    @classmethod
    def abelian(cls, n: int, name: str | None = None) -> "StructureEquations":
        z = np.zeros((n, n, n), complex)
        return cls(n, z, z, z, name or f"abelian{n}")

    def terms(self) -> list[tuple[int, str, int, int, complex]]:
        """Canonical nonzero terms, sorted by (k, type, i, j); 0-based."""
        out = []
        n = self.n
        for k in range(n):
            for typ, arr, upper in (("pp", self.E, True), ("pm", self.F, False), ("mm", self.G, True)):
                for i in range(n):
                    for j in range(i + 1 if upper else 0, n):
                        c = complex(arr[k, i, j])
                        if abs(c) > 0:
                            out.append((k, typ, i, j, c))
        return out

    # --- derived data -----------------------------------------------------

    @cached_property
    def dgen(self) -> np.ndarray:
        """``D[k, g, h] = d psi_k (X_g, X_h)`` over all 2n generators."""
        n = self.n
        D = np.zeros((2 * n, 2 * n, 2 * n), complex)
        D[:n, :n, :n] = self.E
        D[:n, :n, n:] = self.F
        D[:n, n:, :n] = -np.swapaxes(self.F, 1, 2)
        D[:n, n:, n:] = self.G
        swap = np.r_[n : 2 * n, 0:n]
        D[n:] = np.conj(D[:n][:, swap][:, :, swap])
        D.setflags(write=False)
        return D

    @cached_property
    def dgen_forms(self) -> tuple[InvariantForm, ...]:
        n = self.n
        out = []
        for k in range(2 * n):
            raw = {}
            for g in range(2 * n):
                for h in range(g + 1, 2 * n):
                    if abs(self.dgen[k, g, h]) > DROP_TOL:
                        raw[(g, h)] = self.dgen[k, g, h]
            out.append(InvariantForm.make(n, raw))
        return tuple(out)

    @cached_property
    def report(self) -> ValidationReport:
        n = self.n
        worst, res = None, 0.0
        for k in range(n):
            r = _d_raw(self, self.dgen_forms[k]).max_abs()
            if r > res:
                worst, res = k, r
        gmax = max_abs(self.G)
        return ValidationReport(res, worst, gmax <= DROP_TOL, gmax)

    @property
    def validated(self) -> bool:
        return self.report.passed

    @property
    def integrable(self) -> bool:
        return self.report.integrable

    def require_geometric(self):
        """Raise unless the structure is a Lie algebra with integrable J."""
        if not self.validated:
            r = self.report
            raise NotValidated(
                f"{self.name or 'structure'}: d^2 phi_{(r.worst_generator or 0) + 1} "
                f"has coefficient {r.d2_residual:.3e}"
            )
        if not self.integrable:
            raise NotValidated(
                f"{self.name or 'structure'}: integrability violated "
                f"((0,2) part of d phi has size {self.report.g_max:.3e})"
            )

    def with_name(self, name: str) -> "StructureEquations":
        return StructureEquations(self.n, self.E, self.F, self.G, name)


def validate(S: StructureEquations) -> ValidationReport:
    return S.report


def transform_structure(S: StructureEquations, U) -> StructureEquations:
    """Structure equations of the coframe ``phi' = U phi``."""
    U = np.asarray(getattr(U, "matrix", U), dtype=complex)
    n = S.n
    W = np.zeros((2 * n, 2 * n), complex)
    W[:n, :n] = U
    W[n:, n:] = U.conj()
    Wc = W.conj()
    D2 = np.einsum("km,ga,hb,mab->kgh", W, Wc, Wc, S.dgen)
    return StructureEquations(
        n, D2[:n, :n, :n], D2[:n, :n, n:2 * n], D2[:n, n:, n:], S.name
    )


# ---------------------------------------------------------------------------


def _d_raw(S: StructureEquations, a: InvariantForm) -> InvariantForm:
    if a.n != S.n:
        raise DimensionMismatch(f"form over n={a.n}, structure over n={S.n}")
    dg = S.dgen_forms
    raw = []
    for mono, c in a.terms.items():
        for m, g in enumerate(mono):
            sign = -1 if m % 2 else 1
            head, tail = mono[:m], mono[m + 1 :]
            for k2, v2 in dg[g].terms.items():
                raw.append((head + k2 + tail, sign * c * v2))
    return InvariantForm.make(S.n, raw)


def d(S: StructureEquations, a: InvariantForm) -> InvariantForm:
    if not S.validated:
        raise NotValidated(f"{S.name or 'structure'} failed d^2 = 0")
    return _d_raw(S, a)


def dbar_del_split(S: StructureEquations, a: InvariantForm):
    """Return ``(del a, dbar a)`` for a form of pure bidegree."""
    S.require_geometric()
    bd = a.bidegree()
    if bd is None:
        return InvariantForm.zero(S.n), InvariantForm.zero(S.n)
    p, q = bd
    da = _d_raw(S, a)
    return da.part(p + 1, q), da.part(p, q + 1)


def del_(S, a):
    return dbar_del_split(S, a)[0]


def dbar(S, a):
    return dbar_del_split(S, a)[1]


def ddbar(S: StructureEquations, a: InvariantForm) -> InvariantForm:
    """del dbar a."""
    return del_(S, dbar(S, a))


def gauduchon_check(S: StructureEquations) -> float:
    """max coefficient of del dbar (omega^{n-1})."""
    S.require_geometric()
    return ddbar(S, power(kahler_form(S.n), S.n - 1)).max_abs()


def pluriclosed_check(S: StructureEquations) -> float:
    """max coefficient of del dbar omega."""
    S.require_geometric()
    return ddbar(S, kahler_form(S.n)).max_abs()
