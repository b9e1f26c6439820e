"""Pointwise checks of conformal metrics ``e^{2u} g`` on domains of C^n.

Scalar fields are ordinary Python callables acting on :class:`RealJet` values,
so ``u`` is written with the operators here (``log``, ``exp``, ``abs2``, the
arithmetic operators) and carries exact first and second derivatives with it.
A jet lives over the real coordinates ``(x_1..x_n, y_1..y_n)`` with
``z_k = x_k + i y_k``; :func:`jet` converts to Wirtinger derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidParameter, SingularPoint
from .tensor_core import max_abs

GUARD_RADIUS = 1e-6
REALITY_TOL = 1e-12


class RealJet:
    """Value, gradient and Hessian over m real variables (complex-valued)."""

    __slots__ = ("v", "g", "H")

    def __init__(self, v, g, H):
        self.v = complex(v)
        self.g = g
        self.H = H

    @property
    def m(self) -> int:
        return self.g.shape[0]

    @classmethod
    def constant(cls, c, m: int) -> "RealJet":
        return cls(c, np.zeros(m, complex), np.zeros((m, m), complex))

    @classmethod
    def variable(cls, x: float, idx: int, m: int) -> "RealJet":
        g = np.zeros(m, complex)
        g[idx] = 1.0
        return cls(x, g, np.zeros((m, m), complex))

    def _lift(self, other) -> "RealJet":
        if isinstance(other, RealJet):
            return other
        return RealJet.constant(other, self.m)

    def __add__(self, other):
        o = self._lift(other)
        return RealJet(self.v + o.v, self.g + o.g, self.H + o.H)

    __radd__ = __add__

    def __neg__(self):
        return RealJet(-self.v, -self.g, -self.H)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, RealJet):
            c = complex(other)
            return RealJet(self.v * c, self.g * c, self.H * c)
        o = other
        H = self.H * o.v + o.H * self.v + np.outer(self.g, o.g) + np.outer(o.g, self.g)
        return RealJet(self.v * o.v, self.g * o.v + o.g * self.v, H)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, RealJet):
            return self * (1.0 / complex(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise InvalidParameter("only non-negative integer powers are supported")
        out = RealJet.constant(1.0, self.m)
        for _ in range(k):
            out = out * self
        return out

    def _apply(self, f0, f1, f2) -> "RealJet":
        # chain rule for a scalar function with derivatives f1, f2 at v
        return RealJet(f0, f1 * self.g, f1 * self.H + f2 * np.outer(self.g, self.g))

    def reciprocal(self):
        v = self.v
        if v == 0:
            raise SingularPoint("division by zero in field evaluation")
        return self._apply(1 / v, -1 / v**2, 2 / v**3)

    def conj(self):
        return RealJet(np.conj(self.v), np.conj(self.g), np.conj(self.H))

    @property
    def real(self):
        return RealJet(self.v.real, self.g.real.astype(complex), self.H.real.astype(complex))


def exp(x: RealJet) -> RealJet:
    e = np.exp(x.v)
    return x._apply(e, e, e)


def log(x: RealJet) -> RealJet:
    v = x.v
    if v == 0:
        raise SingularPoint("log of zero in field evaluation")
    return x._apply(np.log(v), 1 / v, -1 / v**2)


def abs2(x: RealJet) -> RealJet:
    return x * x.conj()


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Jet2:
    """Wirtinger derivatives of a scalar field at a point."""

    value: complex
    dz: np.ndarray  # u_i
    dzbar: np.ndarray  # u_{bar i}
    dzz: np.ndarray  # u_{ij}
    dzzbar: np.ndarray  # u_{i bar j}
    dzbarzbar: np.ndarray

    def reality_defect(self) -> float:
        return max(abs(np.imag(self.value)), max_abs(np.conj(self.dz) - self.dzbar),
                   max_abs(np.conj(self.dzzbar) - self.dzzbar.T))


Field = Callable[[Sequence[RealJet]], RealJet]
Background = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def flat_background(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``g_{i bar j} = delta_ij`` with vanishing first derivatives."""
    n = z.size
    return np.eye(n, dtype=complex), np.zeros((n, n, n), complex)


@dataclass(frozen=True)
class ConformalChart:
    """The metric ``e^{2u} g`` on a domain of C^n.

    ``background(z)`` returns ``(g, dg)`` with ``g[i, j] = g_{i bar j}`` and
    ``dg[k, i, j] = d/dz_k g_{i bar j}``; ``g`` must be Kahler.
    """

    n: int
    u: Field
    background: Background = flat_background
    singular_points: tuple = ()
    guard_radius: float = GUARD_RADIUS
    domain: Optional[Callable[[np.ndarray], bool]] = None
    name: str = ""
    _pts: tuple = field(init=False, repr=False, default=())

    def __post_init__(self):
        pts = tuple(np.asarray(p, complex).reshape(self.n) for p in self.singular_points)
        object.__setattr__(self, "_pts", pts)

    def admit(self, z) -> np.ndarray:
        z = np.asarray(z, complex).reshape(-1)
        if z.size != self.n:
            raise InvalidParameter(f"point has {z.size} coordinates, chart has n={self.n}")
        for p in self._pts:
            if np.linalg.norm(z - p) < self.guard_radius:
                raise SingularPoint(f"point {z} is within {self.guard_radius:g} of excluded point {p}")
        if self.domain is not None and not self.domain(z):
            raise SingularPoint(f"point {z} is outside the chart domain")
        return z

    def real_jet(self, z) -> RealJet:
        z = self.admit(z)
        n = self.n
        m = 2 * n
        zs = [
            RealJet.variable(z[k].real, k, m) + 1j * RealJet.variable(z[k].imag, n + k, m)
            for k in range(n)
        ]
        out = self.u(zs)
        if not isinstance(out, RealJet):
            out = RealJet.constant(out, m)
        if not (np.isfinite(out.v) and np.all(np.isfinite(out.g)) and np.all(np.isfinite(out.H))):
            raise SingularPoint(f"field is not finite at {z}")
        return out

    def value(self, z) -> complex:
        return self.real_jet(z).v


def _wirtinger(n: int):
    I = np.eye(n)
    P = 0.5 * np.hstack([I, -1j * I])  # d/dz
    Pb = 0.5 * np.hstack([I, 1j * I])  # d/dzbar
    return P, Pb


def jet(chart: ConformalChart, z) -> Jet2:
    rj = chart.real_jet(z)
    P, Pb = _wirtinger(chart.n)
    J = Jet2(
        value=rj.v,
        dz=P @ rj.g,
        dzbar=Pb @ rj.g,
        dzz=P @ rj.H @ P.T,
        dzzbar=P @ rj.H @ Pb.T,
        dzbarzbar=Pb @ rj.H @ Pb.T,
    )
    defect = J.reality_defect()
    scale = max(1.0, abs(J.value), max_abs(J.dz), max_abs(J.dzz), max_abs(J.dzzbar))
    if defect > REALITY_TOL * scale:
        raise InvalidParameter(f"field is not real-valued at {z} (defect {defect:.2e})")
    return J


# ---------------------------------------------------------------------------


def vaisman_pde_residual(chart: ConformalChart, z) -> float:
    """Largest defect of the second-order system a Vaisman conformal factor must solve.

    ``u_ij = 2 u_i u_j + sum_k u_k Gamma^k_ij`` and
    ``u_{i bar j} = 2 u_i u_{bar j} - 2 |du|^2_g g_{i bar j}``.
    """
    J = jet(chart, z)
    zz = chart.admit(z)
    g, dg = chart.background(zz)
    ginv = np.linalg.inv(g)  # ginv[l, k] = g^{bar l k}
    Gamma = np.einsum("jil,lk->kij", dg, ginv)
    r1 = J.dzz - 2 * np.outer(J.dz, J.dz) - np.einsum("k,kij->ij", J.dz, Gamma)
    normsq = np.einsum("ji,i,j->", ginv, J.dz, J.dzbar)
    r2 = J.dzzbar - 2 * np.outer(J.dz, J.dzbar) + 2 * normsq * g
    return max(max_abs(r1), max_abs(r2))


def lee_form_check(chart: ConformalChart, z) -> float:
    """Compare ``d omega`` with ``psi ^ omega`` for the metric ``e^{2u} g``.

    ``d omega`` comes from differentiating the jet of ``e^{2u}``; ``psi`` is
    ``-(eta + conj eta)/(n-1)`` with ``eta`` the trace of the Chern torsion of
    ``h = e^{2u} g`` computed from ``h^{-1}`` and ``dh``.
    """
    n = chart.n
    if n < 2:
        raise InvalidParameter("the Lee form needs n >= 2")
    zz = chart.admit(z)
    rj = chart.real_jet(zz)
    w = exp(2.0 * rj.real)
    P, Pb = _wirtinger(n)
    w_z, w_zb = P @ w.g, Pb @ w.g
    g, dg = chart.background(zz)
    dgb = np.conj(np.transpose(dg, (0, 2, 1)))  # dgb[k, i, j] = d/dzbar_k g_{i bar j}
    h = w.v * g
    dh = np.einsum("k,ij->kij", w_z, g) + w.v * dg
    dhb = np.einsum("k,ij->kij", w_zb, g) + w.v * dgb

    # Chern torsion of h in coordinates: T^k_ij = h^{k bar l}(d_i h_{j bar l} - d_j h_{i bar l})
    hinv = np.linalg.inv(h)  # hinv[l, k] = h^{bar l k}
    T = np.einsum("ijl,lk->kij", dh, hinv) - np.einsum("jil,lk->kij", dh, hinv)
    eta = np.einsum("iik->k", T)
    psi10 = -eta / (n - 1)
    psi01 = np.conj(psi10)

    # (2,1) part, antisymmetrized in the two holomorphic slots
    lhs21 = dh - np.swapaxes(dh, 0, 1)
    rhs21 = np.einsum("k,ij->kij", psi10, h)
    rhs21 = rhs21 - np.swapaxes(rhs21, 0, 1)
    # (1,2) part, antisymmetrized in the two antiholomorphic slots; axes (k, i, j)
    lhs12 = dhb - np.transpose(dhb, (2, 1, 0))
    rhs12 = np.einsum("k,ij->kij", psi01, h)
    rhs12 = rhs12 - np.transpose(rhs12, (2, 1, 0))
    return max(max_abs(lhs21 - rhs21), max_abs(lhs12 - rhs12))


def ad_crosscheck(chart: ConformalChart, z, h: float = 1e-5) -> float:
    """Max relative error of jet derivatives against finite differences.

    Gradients use central differences with step ``h``.  Hessians use the
    four-point mixed stencil with Richardson extrapolation at step
    ``max(h, 1e-3)``, since a plain step of ``h`` loses half the digits to
    rounding.  Errors are relative to ``max(|fd|, 1)``.
    """
    z0 = chart.admit(z)
    n = chart.n
    m = 2 * n
    x0 = np.concatenate([z0.real, z0.imag])

    def f(x):
        return chart.value(x[:n] + 1j * x[n:]).real

    rj = chart.real_jet(z0)
    E = np.eye(m)
    grad = np.array([(f(x0 + h * E[a]) - f(x0 - h * E[a])) / (2 * h) for a in range(m)])

    def hess(step):
        out = np.empty((m, m))
        for a in range(m):
            for b in range(a, m):
                ea, eb = step * E[a], step * E[b]
                v = (f(x0 + ea + eb) - f(x0 + ea - eb) - f(x0 - ea + eb) + f(x0 - ea - eb)) / (4 * step**2)
                out[a, b] = out[b, a] = v
        return out

    h2 = max(h, 1e-3)
    H = (4 * hess(h2 / 2) - hess(h2)) / 3

    def rel(ad, fd):
        return float(np.max(np.abs(ad - fd) / np.maximum(np.abs(fd), 1.0)))

    return max(rel(rj.g.real, grad), rel(rj.H.real, H))


# ---------------------------------------------------------------------------
# the conformal family on C^2 minus a point, and samplers


def point_distance_field(center) -> Field:
    """``u = -1/2 log |z - center|^2``."""
    c = [complex(x) for x in center]

    def u(z):
        s = abs2(z[0] - c[0])
        for k in range(1, len(c)):
            s = s + abs2(z[k] - c[k])
        return -0.5 * log(s)

    return u


def point_distance_chart(center, name: str = "") -> ConformalChart:
    c = np.asarray(center, complex).reshape(-1)
    return ConformalChart(
        n=c.size, u=point_distance_field(c), singular_points=(c,),
        name=name or f"point_distance({', '.join(f'{x:.3g}' for x in c)})",
    )


def sample_points(rng: np.random.Generator, count: int, n: int = 2, radius: float = 1.0) -> np.ndarray:
    """Uniform points in the box ``[-radius, radius]^{2n}`` as complex vectors."""
    x = rng.uniform(-radius, radius, size=(count, 2 * n))
    return x[:, :n] + 1j * x[:, n:]


def sample_centers(rng: np.random.Generator, count: int, n: int = 2, inner: float = 2.0, outer: float = 3.0) -> np.ndarray:
    """Centers with norm in ``[inner, outer]``, i.e. away from the default sample box."""
    v = rng.normal(size=(count, 2 * n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    v *= rng.uniform(inner, outer, size=(count, 1))
    return v[:, :n] + 1j * v[:, n:]


@dataclass
class PDESweep:
    center: np.ndarray
    samples: int
    max_residual: float
    worst_point: np.ndarray


def vaisman_pde_sweep(center, samples: int = 100, seed: int = 0, radius: float = 1.0) -> PDESweep:
    chart = point_distance_chart(center)
    rng = np.random.default_rng(seed)
    worst, wp = -1.0, None
    for z in sample_points(rng, samples, chart.n, radius):
        try:
            r = vaisman_pde_residual(chart, z)
        except SingularPoint:
            continue
        if r > worst:
            worst, wp = r, z
    return PDESweep(np.asarray(center, complex), samples, max(worst, 0.0), wp)
