"""Chern, Bismut and Levi-Civita data of a left-invariant Hermitian structure.

Conventions (unitary frame e, dual coframe phi, metric = identity):

=====================  =========================================================
connection             ``nabla e_i = sum_j theta_ij e_j``
Chern structure eqn   ``d phi = -theta^T ^ phi + tau``, tau of type (2,0)
torsion components     ``tau_k = 1/2 sum T^k_ij phi_i ^ phi_j``
curvature              ``Theta = d theta - theta ^ theta``
curvature components   ``R_{i jb k lb} = Theta_kl(e_i, conj e_j)``,
                       ``R_{i j k lb} = Theta_kl(e_i, e_j)``
Bismut                 ``theta^b = theta + gamma``,
                       ``gamma_ij = sum_k T^j_ik phi_k - conj(T^i_jk) conj(phi_k)``
Levi-Civita            ``nabla e = theta_1 e + conj(theta_2) conj(e)``,
                       ``theta_1 = theta + gamma/2``,
                       ``(theta_2)_ij = 1/2 sum_k conj(T^k_ij) phi_k``
=====================  =========================================================

Array layouts.  A connection is stored as ``theta[i, j, g] = theta_ij(X_g)``
where ``X = (e_1..e_n, conj e_1..conj e_n)``.  Torsion ``T[k, i, j] = T^k_ij``.
Curvature ``R11[i, j, k, l] = R_{i jb k lb}`` and ``R20[i, j, k, l] = R_{i j k lb}``.
A covariant derivative appends one ``direction`` axis of extent 2n.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch
from .forms import InvariantForm, StructureEquations, from_coefficients
from .tensor_core import BARRED, DIRECTION, LOWER, UPPER, DenseTensor, max_abs

CHERN = "chern"
BISMUT = "bismut"
LC_THETA1 = "levi_civita_theta1"
LC_THETA2 = "levi_civita_theta2"
CONNECTION_KINDS = (CHERN, BISMUT, LC_THETA1, LC_THETA2)


def bar_index(n: int) -> np.ndarray:
    """Permutation swapping the (1,0) and (0,1) halves of 0..2n-1."""
    return np.r_[n : 2 * n, 0:n]


@dataclass(frozen=True, eq=False)
class ConnectionMatrix:
    n: int
    coeffs: np.ndarray  # (n, n, 2n)
    kind: str

    def form(self, i: int, j: int) -> InvariantForm:
        n = self.n
        return from_coefficients(n, self.coeffs[i, j, :n], "p") + from_coefficients(
            n, self.coeffs[i, j, n:], "b"
        )

    @property
    def entries(self) -> list[list[InvariantForm]]:
        return [[self.form(i, j) for j in range(self.n)] for i in range(self.n)]

    def skew_hermitian_defect(self) -> float:
        """max |theta_ij + conj(theta_ji)| coefficientwise."""
        c = self.coeffs
        conj_t = np.conj(np.swapaxes(c, 0, 1)[:, :, bar_index(self.n)])
        return max_abs(c + conj_t)

    def skew_symmetric_defect(self) -> float:
        return max_abs(self.coeffs + np.swapaxes(self.coeffs, 0, 1))


@dataclass(frozen=True, eq=False)
class TorsionTensor:
    n: int
    T: np.ndarray  # T[k, i, j] = T^k_ij

    def as_dense(self) -> DenseTensor:
        return DenseTensor(self.T, (UPPER, LOWER, LOWER), antisymmetric=((1, 2),))


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    n: int
    R11: np.ndarray
    R20: np.ndarray
    kind: str
    r02_defect: float = 0.0  # mismatch of the (0,2) part against conj pairing


@dataclass(frozen=True, eq=False)
class DerivedTensors:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    phi: np.ndarray  # phi[i, j] = phi^j_i
    phi_star: np.ndarray
    Q: np.ndarray
    P: np.ndarray  # P[i, k, j, l] = P^{jl}_{ik}
    ricQ: np.ndarray
    eta: np.ndarray
    chi: np.ndarray

    @property
    def ricq_identity_residual(self) -> float:
        """max |Ric(Q) - (B - phi - phi*)|; zero on BTP structures."""
        return max_abs(self.ricQ - (self.B - self.phi - self.phi_star))


# ---------------------------------------------------------------------------
# covariant derivatives of invariant tensors


def _cov_array(theta: np.ndarray, data: np.ndarray, kinds) -> np.ndarray:
    """Connection-term part of the covariant derivative over a Hermitian theta."""
    n = theta.shape[0]
    theta_bar = np.conj(theta[:, :, bar_index(n)])
    data = np.asarray(data, complex)
    out = np.zeros(data.shape + (2 * n,), complex)
    for ax, kind in enumerate(kinds):
        if data.shape[ax] != n:
            raise DimensionMismatch(f"axis {ax} has extent {data.shape[ax]}, expected {n}")
        if kind == UPPER:
            part = np.tensordot(data, theta, axes=([ax], [0]))
            out += np.moveaxis(part, -2, ax)
        elif kind in (LOWER, BARRED):
            m = theta if kind == LOWER else theta_bar
            part = np.tensordot(data, m, axes=([ax], [1]))
            out -= np.moveaxis(part, -2, ax)
        else:
            raise ValueError(f"cannot differentiate along a {kind!r} axis")
    return out


def _cov_array_real(omega: np.ndarray, data: np.ndarray, kinds) -> np.ndarray:
    """Same for a general connection on the complexified tangent bundle.

    ``omega[a, c, g]`` gives ``nabla_{X_g} X_a = sum_c omega[a, c, g] X_c``;
    every axis has extent 2n and kind upper or lower.
    """
    data = np.asarray(data, complex)
    out = np.zeros(data.shape + (omega.shape[2],), complex)
    for ax, kind in enumerate(kinds):
        if kind == UPPER:
            out += np.moveaxis(np.tensordot(data, omega, axes=([ax], [0])), -2, ax)
        elif kind == LOWER:
            out -= np.moveaxis(np.tensordot(data, omega, axes=([ax], [1])), -2, ax)
        else:
            raise ValueError(f"unsupported kind {kind!r}")
    return out


def torsion_of(omega: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Torsion of a connection on the complexified bundle.

    ``out[a, b, c]`` is the X_c component of ``T(X_a, X_b)``.
    """
    return (
        np.transpose(omega, (2, 0, 1))  # omega[b, c, a] placed at [a, b, c]
        - np.transpose(omega, (0, 2, 1))
        + np.transpose(D, (1, 2, 0))
    )


def hermitian_to_real(theta: np.ndarray) -> np.ndarray:
    n = theta.shape[0]
    om = np.zeros((2 * n, 2 * n, 2 * n), complex)
    om[:n, :n] = theta
    om[n:, n:] = np.conj(theta[:, :, bar_index(n)])
    return om


# ---------------------------------------------------------------------------


class Geometry:
    """Lazily computed, cached geometric data of one structure."""

    def __init__(self, S: StructureEquations):
        S.require_geometric()
        self.S = S
        self.n = S.n
        self.D = S.dgen

    # --- connections -------------------------------------------------------

    @cached_property
    def theta(self) -> np.ndarray:
        n, F = self.n, self.S.F
        th = np.zeros((n, n, 2 * n), complex)
        # (0,1) part fixed by the (1,1) structure constants, (1,0) part by skew-Hermitian symmetry
        th[:, :, n:] = np.transpose(F, (1, 0, 2))
        th[:, :, :n] = -np.conj(F)
        return th

    @cached_property
    def T(self) -> np.ndarray:
        th = self.theta[:, :, : self.n]
        # T[k, a, b] = E[k, a, b] + theta[b, k, a] - theta[a, k, b]
        return self.S.E + np.transpose(th, (1, 2, 0)) - np.transpose(th, (1, 0, 2))

    @cached_property
    def gamma(self) -> np.ndarray:
        n, T = self.n, self.T
        g = np.zeros((n, n, 2 * n), complex)
        g[:, :, :n] = np.transpose(T, (1, 0, 2))  # T^j_ik at [i, j, k]
        g[:, :, n:] = -np.conj(T)  # -conj(T^i_jk) at [i, j, k]
        return g

    @cached_property
    def theta_b(self) -> np.ndarray:
        return self.theta + self.gamma

    @cached_property
    def theta1(self) -> np.ndarray:
        return self.theta + 0.5 * self.gamma

    @cached_property
    def theta2(self) -> np.ndarray:
        n = self.n
        t2 = np.zeros((n, n, 2 * n), complex)
        t2[:, :, :n] = 0.5 * np.conj(np.transpose(self.T, (1, 2, 0)))
        return t2

    @cached_property
    def omega_lc(self) -> np.ndarray:
        n = self.n
        bar = bar_index(n)
        om = np.zeros((2 * n, 2 * n, 2 * n), complex)
        om[:n, :n] = self.theta1
        om[:n, n:] = np.conj(self.theta2[:, :, bar])
        om[n:, :n] = self.theta2
        om[n:, n:] = np.conj(self.theta1[:, :, bar])
        return om

    def theta_t(self, t: float) -> np.ndarray:
        """Gauduchon line: (1-t) Chern + t Bismut."""
        return self.theta + t * self.gamma

    # --- curvature ---------------------------------------------------------

    def curvature_array(self, theta: np.ndarray) -> np.ndarray:
        """``Theta[k, l, g, h] = (d theta - theta ^ theta)_kl (X_g, X_h)``."""
        dth = np.einsum("klm,mgh->klgh", theta, self.D)
        tt = np.einsum("kpg,plh->klgh", theta, theta)
        return dth - (tt - np.swapaxes(tt, 2, 3))

    def _curvature(self, theta, kind) -> CurvatureTensor:
        n = self.n
        Th = self.curvature_array(theta)
        R11 = np.transpose(Th[:, :, :n, n:], (2, 3, 0, 1))
        R20 = np.transpose(Th[:, :, :n, :n], (2, 3, 0, 1))
        # (0,2) part: Theta_kl(conj e_i, conj e_j) = -conj(Theta_lk(e_i, e_j))
        R02 = np.transpose(Th[:, :, n:, n:], (2, 3, 0, 1))
        defect = max_abs(R02 + np.conj(np.swapaxes(R20, 2, 3)))
        return CurvatureTensor(n, R11, R20, kind, defect)

    @cached_property
    def chern_curvature(self) -> CurvatureTensor:
        return self._curvature(self.theta, CHERN)

    @cached_property
    def bismut_curvature(self) -> CurvatureTensor:
        return self._curvature(self.theta_b, BISMUT)

    # --- derivatives -------------------------------------------------------

    def nabla(self, theta: np.ndarray, data, kinds) -> np.ndarray:
        return _cov_array(theta, data, kinds)

    def nabla_b(self, data, kinds) -> np.ndarray:
        return _cov_array(self.theta_b, data, kinds)

    def nabla_c(self, data, kinds) -> np.ndarray:
        return _cov_array(self.theta, data, kinds)

    @cached_property
    def DbT(self) -> np.ndarray:
        """``DbT[k, i, j, g] = T^k_{ij,g}`` (Bismut)."""
        return self.nabla_b(self.T, (UPPER, LOWER, LOWER))

    @cached_property
    def DcT(self) -> np.ndarray:
        return self.nabla_c(self.T, (UPPER, LOWER, LOWER))

    # --- torsion-derived quantities -----------------------------------------

    @cached_property
    def eta(self) -> np.ndarray:
        return np.einsum("iik->k", self.T)

    @cached_property
    def derived(self) -> DerivedTensors:
        T = self.T
        Tc = np.conj(T)
        eta = self.eta
        A = np.einsum("rsi,rsj->ij", T, Tc)
        B = np.einsum("jrs,irs->ij", T, Tc)
        C = np.einsum("rsi,srk->ik", T, T)
        phi = np.einsum("r,jir->ij", np.conj(eta), T)
        P = self.P
        R11 = self.bismut_curvature.R11
        Q = R11 - np.transpose(R11, (2, 1, 0, 3))
        ricQ = np.einsum("ijrr->ij", R11) - np.einsum("rjir->ij", R11)
        return DerivedTensors(
            A=A, B=B, C=C, phi=phi, phi_star=phi.conj().T, Q=Q, P=P,
            ricQ=ricQ, eta=eta, chi=np.conj(eta),
        )

    @cached_property
    def P(self) -> np.ndarray:
        """``P[i, k, j, l] = P^{jl}_{ik}``."""
        T, Tc = self.T, np.conj(self.T)
        return (
            np.einsum("rik,rjl->ikjl", T, Tc)
            + np.einsum("jir,klr->ikjl", T, Tc)
            - np.einsum("jkr,ilr->ikjl", T, Tc)
            - np.einsum("lir,kjr->ikjl", T, Tc)
            + np.einsum("lkr,ijr->ikjl", T, Tc)
        )

    # --- generic-connection views ------------------------------------------

    @cached_property
    def bismut_torsion_real(self) -> np.ndarray:
        return torsion_of(hermitian_to_real(self.theta_b), self.D)

    @cached_property
    def chern_torsion_real(self) -> np.ndarray:
        return torsion_of(hermitian_to_real(self.theta), self.D)

    @cached_property
    def lc_torsion_real(self) -> np.ndarray:
        return torsion_of(self.omega_lc, self.D)


_CACHE: "weakref.WeakKeyDictionary[StructureEquations, Geometry]" = weakref.WeakKeyDictionary()


def geometry(S: StructureEquations) -> Geometry:
    g = _CACHE.get(S)
    if g is None:
        g = Geometry(S)
        _CACHE[S] = g
    return g


# ---------------------------------------------------------------------------
# public operations


def chern_connection(S: StructureEquations) -> ConnectionMatrix:
    g = geometry(S)
    return ConnectionMatrix(S.n, g.theta, CHERN)


def chern_torsion(S: StructureEquations) -> TorsionTensor:
    return TorsionTensor(S.n, geometry(S).T)


def bismut_connection(S: StructureEquations) -> ConnectionMatrix:
    return ConnectionMatrix(S.n, geometry(S).theta_b, BISMUT)


def levi_civita(S: StructureEquations) -> tuple[ConnectionMatrix, ConnectionMatrix]:
    g = geometry(S)
    return ConnectionMatrix(S.n, g.theta1, LC_THETA1), ConnectionMatrix(S.n, g.theta2, LC_THETA2)


def gamma_matrix(S: StructureEquations) -> ConnectionMatrix:
    return ConnectionMatrix(S.n, geometry(S).gamma, "gamma")


def chern_reconstruction_residual(S: StructureEquations) -> float:
    """max |d phi_k + (theta^T ^ phi)_k - tau_k| over all coefficients."""
    g = geometry(S)
    n = S.n
    worst = 0.0
    for k in range(n):
        lhs = S.dgen_forms[k]
        for i in range(n):
            lhs = lhs + (g_form(g.theta, i, k) ^ InvariantForm(n, {(i,): 1.0}))
        tau = from_coefficients(n, 0.5 * g.T[k], "pp")
        worst = max(worst, (lhs - tau).max_abs())
    return worst


def g_form(theta: np.ndarray, i: int, j: int) -> InvariantForm:
    n = theta.shape[0]
    return from_coefficients(n, theta[i, j, :n], "p") + from_coefficients(n, theta[i, j, n:], "b")


def curvature(S: StructureEquations, conn: ConnectionMatrix) -> CurvatureTensor:
    g = geometry(S)
    if conn.kind == CHERN:
        return g.chern_curvature
    if conn.kind == BISMUT:
        return g.bismut_curvature
    return g._curvature(conn.coeffs, conn.kind)


def covariant_derivative(S: StructureEquations, conn: ConnectionMatrix, T: DenseTensor) -> DenseTensor:
    """Append a direction axis holding ``nabla_{X_g} T`` for invariant ``T``."""
    if any(d != S.n for d in T.dims):
        raise DimensionMismatch(f"tensor dims {T.dims} do not all equal n={S.n}")
    data = _cov_array(conn.coeffs, T.data, T.kinds)
    return DenseTensor(data, T.kinds + (DIRECTION,))


def derived_tensors(S: StructureEquations) -> DerivedTensors:
    return geometry(S).derived


def eta_form(S: StructureEquations) -> InvariantForm:
    return from_coefficients(S.n, geometry(S).eta, "p")


def t_gauduchon_check(S: StructureEquations, t: float, t1: float, t2: float) -> dict:
    """Parallelism of two Gauduchon-line torsions under the t-connection.

    Returns ``max|nabla^t T^{t1}|`` and ``max|nabla^t T^{t2}|``.  No verdict is
    attached; the two should vanish together.
    """
    g = geometry(S)
    om = hermitian_to_real(g.theta_t(t))
    out = {}
    for name, s in (("t1", t1), ("t2", t2)):
        tors = torsion_of(hermitian_to_real(g.theta_t(s)), g.D)
        out[name] = max_abs(_cov_array_real(om, tors, (LOWER, LOWER, UPPER)))
    return out
