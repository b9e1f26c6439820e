"""Small dense complex tensors, unitary matrices and frame changes.

Frame-change convention used throughout the package: a unitary matrix ``U``
acts on the unitary coframe by ``phi' = U phi``.  The dual frame is then
``e'_i = sum_j conj(U_ij) e_j``, so

* an upper (vector) index transforms by ``U``,
* a lower index (slot filled by ``e_i``) transforms by ``conj(U)``,
* a lower-barred index (slot filled by ``conj(e_j)``) transforms by ``U``.

For a unitary frame an upper index and a lower-barred index are the same
thing, which is why they share a transformation rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NoConvergence, NotNormal

DEFAULT_TOL = 1e-9
MAX_DIM = 8
SYMMETRY_TOL = 1e-12
UNITARY_TOL = 1e-10

UPPER = "upper"
LOWER = "lower"
BARRED = "barred"
# derivative direction over (e_1..e_n, conj(e_1)..conj(e_n)); extent 2n
DIRECTION = "direction"
INDEX_KINDS = (UPPER, LOWER, BARRED, DIRECTION)


def as_complex_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entry (NaN or Inf) in complex data")
    return arr


def max_abs(x) -> float:
    """Largest entry magnitude; 0.0 for empty input."""
    arr = np.asarray(x)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def frob(x) -> float:
    """Frobenius norm; invariant under unitary changes of every axis."""
    return float(np.linalg.norm(np.ravel(np.asarray(x))))


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """A dense complex tensor with one index kind per axis.

    ``antisymmetric`` lists axis pairs that must be skew; ``hermitian`` lists
    axis pairs ``(a, b)`` with ``T[..i..j..] == conj(T[..j..i..])``.
    """

    data: np.ndarray
    kinds: tuple[str, ...]
    antisymmetric: tuple[tuple[int, int], ...] = ()
    hermitian: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        data = as_complex_array(self.data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "kinds", tuple(self.kinds))
        if len(self.kinds) != data.ndim:
            raise DimensionMismatch(
                f"{data.ndim} axes but {len(self.kinds)} index kinds"
            )
        for k in self.kinds:
            if k not in INDEX_KINDS:
                raise ValueError(f"unknown index kind {k!r}")
        for d, k in zip(data.shape, self.kinds):
            if d > (2 * MAX_DIM if k == DIRECTION else MAX_DIM):
                raise DimensionMismatch(f"extent above cap for {k} axis: {data.shape}")
        for a, b in self.antisymmetric:
            if max_abs(data + np.swapaxes(data, a, b)) > SYMMETRY_TOL:
                raise ValueError(f"axes {a},{b} declared antisymmetric but are not")
        for a, b in self.hermitian:
            if max_abs(data - np.conj(np.swapaxes(data, a, b))) > SYMMETRY_TOL:
                raise ValueError(f"axes {a},{b} declared Hermitian but are not")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def entries(self) -> np.ndarray:
        """Row-major flat view."""
        return self.data.reshape(-1)

    def norm2(self) -> float:
        """Full contraction |T|^2 (unitary frame, so the metric is the identity)."""
        return float(np.sum(np.abs(self.data) ** 2))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    matrix: np.ndarray = field()

    def __post_init__(self):
        m = as_complex_array(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"unitary matrix must be square, got {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise DimensionMismatch(f"n={m.shape[0]} exceeds {MAX_DIM}")
        err = max_abs(m @ m.conj().T - np.eye(m.shape[0]))
        if err > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (|UU* - I| = {err:.2e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> "UnitaryMatrix":
        return cls(np.eye(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "UnitaryMatrix":
        # Haar measure via QR of a complex Ginibre matrix with phase fix
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        q = q * (d / np.abs(d))
        return cls(q)

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        return UnitaryMatrix(self.matrix @ other.matrix)

    @property
    def H(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.matrix.conj().T)


def _sort_key(z: complex):
    # round first so rounding noise in one part cannot override the other
    return (-round(z.real, 10), -round(z.imag, 10))


def _pivoted_gram_schmidt(basis: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(basis columns).

    The spanning set used is the projection of the standard basis onto the
    subspace; at each step the candidate with the largest residual norm is
    taken (first index wins ties).
    """
    n, k = basis.shape
    q, _ = np.linalg.qr(basis)
    proj = q @ q.conj().T
    cands = [proj[:, j].copy() for j in range(n)]
    out = []
    for _ in range(k):
        norms = [np.linalg.norm(c) for c in cands]
        j = int(np.argmax(np.round(norms, 12)))
        v = cands[j] / norms[j]
        # fix the phase so the pivot coordinate is real positive
        v = v * (np.conj(v[j]) / abs(v[j]))
        out.append(v)
        cands = [c - v * np.vdot(v, c) for c in cands]
    return np.stack(out, axis=1)


def unitary_diagonalize_normal(M, tol: float = DEFAULT_TOL):
    """Return ``(U, d)`` with ``U* M U = diag(d)`` for a normal matrix ``M``.

    Eigenvalues are sorted by real part, then imaginary part, both
    descending.  Eigenvectors of an eigenvalue cluster (consecutive gaps
    below ``tol``) are chosen by pivoted Gram-Schmidt, so the output does not
    depend on the eigensolver's internal choices.
    """
    M = as_complex_array(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {M.shape}")
    n = M.shape[0]
    if n > MAX_DIM:
        raise DimensionMismatch(f"n={n} exceeds {MAX_DIM}")
    comm = max_abs(M @ M.conj().T - M.conj().T @ M)
    if comm >= tol:
        raise NotNormal(f"|MM* - M*M| = {comm:.3e} >= tol {tol:.1e}")
    try:
        T, Z = scipy.linalg.schur(M, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"Schur decomposition failed: {exc}") from exc
    evals = np.diag(T)
    order = sorted(range(n), key=lambda j: _sort_key(evals[j]))
    evals = evals[order]
    Z = Z[:, order]

    # split into clusters, then canonicalize each eigenspace
    cols = []
    start = 0
    for j in range(1, n + 1):
        if j == n or abs(evals[j] - evals[j - 1]) >= tol:
            cols.append(_pivoted_gram_schmidt(Z[:, start:j]))
            start = j
    U = np.concatenate(cols, axis=1) if cols else np.zeros((0, 0), complex)
    # recompute eigenvalues from the canonical vectors
    d = np.einsum("ij,jk,ki->i", U.conj().T, M, U)
    return UnitaryMatrix(U), d


def _axis_matrix(kind: str, U: np.ndarray) -> np.ndarray:
    if kind == LOWER:
        return U.conj()
    if kind == DIRECTION:
        return scipy.linalg.block_diag(U.conj(), U)
    return U


def transform_array(data: np.ndarray, kinds, U: np.ndarray) -> np.ndarray:
    out = np.asarray(data)
    n = U.shape[0]
    for ax, kind in enumerate(kinds):
        want = 2 * n if kind == DIRECTION else n
        if out.shape[ax] != want:
            raise DimensionMismatch(
                f"axis {ax} has extent {out.shape[ax]}, expected {want} for n={n}"
            )
        m = _axis_matrix(kind, U)
        out = np.moveaxis(np.tensordot(m, out, axes=([1], [ax])), 0, ax)
    return out


def change_frame(T: DenseTensor, U: UnitaryMatrix) -> DenseTensor:
    """Express ``T`` in the frame whose coframe is ``U phi``."""
    data = transform_array(T.data, T.kinds, U.matrix)
    return DenseTensor(data, T.kinds, T.antisymmetric, T.hermitian)
