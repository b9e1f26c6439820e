"""Example structures with their known classification, plus random generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParameter, ShapeMismatch, ValidationFailed
from .forms import StructureEquations

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    S: StructureEquations
    # only flags with an independent justification go here
    expected: dict[str, bool] = field(default_factory=dict)
    provenance: str = ""
    params: dict = field(default_factory=dict)


def _checked(S: StructureEquations) -> StructureEquations:
    rep = S.report
    if not (rep.passed and rep.integrable):
        k = (rep.worst_generator or 0) + 1
        raise ValidationFailed(
            f"{S.name}: d^2 phi_{k} has coefficient {rep.d2_residual:.3e} "
            f"(integrable={rep.integrable})"
        )
    return S


def nilmanifold(r: int, n: int, Y, name: str = "") -> StructureEquations:
    """``d phi_i = 0`` for i < r and ``d phi_a = sum_i Y[a-r, i] phi_i ^ conj(phi_i)``."""
    Y = np.asarray(Y, dtype=complex)
    if not (1 <= r <= n):
        raise ShapeMismatch(f"need 1 <= r <= n, got r={r}, n={n}")
    if Y.size == 0 and r == n:
        Y = Y.reshape(0, r)
    if Y.ndim == 1 and n - r == 1:
        Y = Y.reshape(1, -1)
    if Y.shape != (n - r, r):
        raise ShapeMismatch(f"Y must have shape {(n - r, r)}, got {Y.shape}")
    terms = [(r + a, "pm", i, i, Y[a, i]) for a in range(n - r) for i in range(r) if Y[a, i] != 0]
    return StructureEquations.from_terms(n, terms, name=name or f"nilmanifold(r={r},n={n})")


def abelian_entry(n: int = 3) -> CatalogEntry:
    S = StructureEquations.abelian(n).with_name(f"abelian{n}")
    flags = {"balanced": True, "btp_direct": True, "bkl": True, "pluriclosed": True}
    return CatalogEntry(S.name, S, flags, "flat Kahler torus", {"n": n})


def n3_example() -> CatalogEntry:
    S = nilmanifold(2, 3, [[1, -1]], name="N3")
    return CatalogEntry(
        "N3", S,
        {"balanced": True, "btp_direct": True, "bkl": False, "vaisman": False},
        "two-step nilmanifold with d phi_3 = phi_1 phibar_1 - phi_2 phibar_2",
    )


def family_ab(a: complex, b: complex) -> CatalogEntry:
    a, b = complex(a), complex(b)
    if a == 0:
        raise InvalidParameter("family_ab requires a != 0")
    S = nilmanifold(2, 3, [[a, b]], name=f"family_ab({_fmt(a)},{_fmt(b)})")
    expected = {
        "btp_direct": True,
        "balanced": b == -a,
        "bkl": (a * b.conjugate()).real == 0,
        "vaisman": b == a,
    }
    return CatalogEntry(S.name, S, expected, "d phi_3 = a phi_1 phibar_1 + b phi_2 phibar_2", {"a": a, "b": b})


def complexified_su2() -> CatalogEntry:
    # sl(2, C) with a unitary basis for the Killing form (up to scale)
    terms = [(0, "pp", 1, 2, 1.0), (1, "pp", 0, 2, -1.0), (2, "pp", 0, 1, 1.0)]
    S = StructureEquations.from_terms(3, terms, name="su2C")
    return CatalogEntry(
        "su2C", S,
        {"balanced": True, "btp_direct": True, "chern_flat": True},
        "complex simple Lie group with its Killing metric",
    )


RICQ5_Y = (1 + 2j, 1 - 1j, 1 - 1j, 1j)


def ricq_counterexample5() -> CatalogEntry:
    S = nilmanifold(4, 5, [RICQ5_Y], name="ricq5")
    return CatalogEntry(
        "ricq5", S,
        {"btp_direct": True, "ricQ_zero": True, "Q_zero": False},
        "two-step nilmanifold with Ric(Q) = 0 but Q != 0",
    )


def twisted_sasakian_model(c1: float = 1.0, c2: float = 1.0, kappa: complex = 1j, sigma_consts=None) -> CatalogEntry:
    """Invariant model of a twisted product of two Sasakian 3-manifolds.

    ``sigma_consts`` is a 2x3 complex array ``s``; the purely imaginary forms are
    ``sigma'_i = sum_k s[i,k] phi_k - conj(s[i,k]) phibar_k``.
    """
    kappa = complex(kappa)
    if not (c1 > 0 and c2 > 0):
        raise InvalidParameter("c1 and c2 must be positive")
    if not kappa.imag > 0:
        raise InvalidParameter(f"twisting parameter must have positive imaginary part, got {kappa}")
    s = np.zeros((2, 3), complex) if sigma_consts is None else np.asarray(sigma_consts, complex)
    if s.shape != (2, 3):
        raise InvalidParameter(f"sigma_consts must have shape (2, 3), got {s.shape}")
    x, y = kappa.real, kappa.imag

    n = 3
    E = np.zeros((n, n, n), complex)  # E[k, i, j] = d phi_k(e_i, e_j)
    F = np.zeros((n, n, n), complex)  # F[k, i, j]: coefficient of phi_i ^ phibar_j
    G = np.zeros((n, n, n), complex)

    def add_E(k, i, j, c):
        E[k, i, j] += c
        E[k, j, i] -= c

    def add_mixed(k, i, j, c):
        # c * phibar_j ^ phi_i = -c * phi_i ^ phibar_j
        F[k, i, j] -= c

    # d phi_1 and d phi_2: (alpha phi_3 + beta phibar_3 + conj(sigma'_i)) ^ phi_i
    alpha = (c1 / SQRT2 * (x + 1j), c2 * y / SQRT2)
    beta = (-c1 / SQRT2 * (x - 1j), -c2 * y / SQRT2)
    for i in range(2):
        add_E(i, 2, i, alpha[i])
        add_mixed(i, i, 2, beta[i])
        # conj(sigma') = -sigma' = sum_k -s phi_k + conj(s) phibar_k
        for k in range(3):
            add_E(i, k, i, -s[i, k])
            add_mixed(i, i, k, np.conj(s[i, k]))
    F[2, 0, 0] += SQRT2 * c1 * 1j
    F[2, 1, 1] += -SQRT2 * c2 * (1 + x * 1j) / y
    name = f"twisted(c1={c1:g},c2={c2:g},kappa={_fmt(kappa)}{',sigma' if np.any(s) else ''})"
    S = _checked(StructureEquations(n, E, F, G, name=name))
    return CatalogEntry(
        name, S, {"btp_direct": True, "balanced": False},
        "twisted Sasakian product model in its natural unitary frame",
        {"c1": c1, "c2": c2, "kappa": kappa, "sigma_consts": s.tolist()},
    )


def random_2step(seed: int, n: int, r: int, density: float = 1.0) -> StructureEquations:
    """Random two-step nilpotent structure with closed phi_1..phi_r and abelian J-pattern.

    Each ``d phi_a`` (a >= r) draws coefficients on ``phi_i ^ phi_j`` (i < j < r)
    and ``phi_i ^ phibar_j`` (i, j < r); each one is kept with probability ``density``.
    """
    if not (1 <= r < n):
        raise InvalidParameter(f"need 1 <= r < n, got r={r}, n={n}")
    rng = np.random.default_rng(seed)
    terms = []
    for a in range(r, n):
        for i in range(r):
            for j in range(r):
                for kind in ("pm", "pp"):
                    if kind == "pp" and i >= j:
                        continue
                    z = complex(rng.normal(), rng.normal())
                    if rng.random() < density:
                        terms.append((a, kind, i, j, z))
    return StructureEquations.from_terms(n, terms, name=f"random_2step(seed={seed},n={n},r={r})")


def random_2step_sample(count: int, seed: int = 0, dims=(2, 3, 4, 5), density: float = 1.0):
    """``count`` random structures with n cycling through ``dims`` and random r."""
    rng = np.random.default_rng(seed)
    out = []
    for m in range(count):
        n = dims[m % len(dims)]
        r = int(rng.integers(1, n))
        out.append(random_2step(int(rng.integers(2**31)), n, r, density))
    return out


def _fmt(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:g}"
    if z.real == 0:
        return f"{z.imag:g}i"
    return f"{z.real:g}{z.imag:+g}i"


# ---------------------------------------------------------------------------
# registry

FAMILY_PRESETS = (1, -1, 1j, 2, 1 + 1j, 0, -2j)


def default_catalog() -> list[CatalogEntry]:
    entries = [abelian_entry(2), abelian_entry(3), n3_example(), complexified_su2(), ricq_counterexample5()]
    entries += [family_ab(1, b) for b in FAMILY_PRESETS]
    entries += [twisted_sasakian_model(1, 1, 1j), twisted_sasakian_model(1, 1, 1 + 1j)]
    return entries


BUILDERS: dict[str, tuple[Callable[..., CatalogEntry], dict]] = {
    "abelian": (lambda n=3: abelian_entry(int(n)), {"n": 3}),
    "N3": (n3_example, {}),
    "family_ab": (lambda a=1, b=1: family_ab(a, b), {"a": 1, "b": 1}),
    "su2C": (complexified_su2, {}),
    "ricq5": (ricq_counterexample5, {}),
    "twisted": (
        lambda c1=1.0, c2=1.0, kappa=1j: twisted_sasakian_model(float(np.real(c1)), float(np.real(c2)), kappa),
        {"c1": 1.0, "c2": 1.0, "kappa": 1j},
    ),
    "random_2step": (
        lambda seed=1, n=4, r=2, density=1.0: _random_entry(int(np.real(seed)), int(np.real(n)), int(np.real(r)), float(np.real(density))),
        {"seed": 1, "n": 4, "r": 2, "density": 1.0},
    ),
}


def _random_entry(seed, n, r, density) -> CatalogEntry:
    S = random_2step(seed, n, r, density)
    return CatalogEntry(S.name, S, {}, "random two-step structure", {"seed": seed, "n": n, "r": r, "density": density})


def catalog_names() -> list[str]:
    return list(BUILDERS)


def build(name: str, **params) -> CatalogEntry:
    try:
        fn, defaults = BUILDERS[name]
    except KeyError:
        raise InvalidParameter(f"unknown catalog entry {name!r}; known: {', '.join(BUILDERS)}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise InvalidParameter(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    return fn(**params)
