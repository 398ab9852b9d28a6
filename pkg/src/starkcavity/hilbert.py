"""Truncated atom (x) cavity Hilbert space and its operator algebra.

Basis ordering is atom-major::

    index(atom, n) = atom * (n_max + 1) + n,   atom in {g=0, e=1}, n in 0..n_max

so for ``n_max = 1`` the order is ``g0, g1, e0, e1``. The three states that
carry the single-excitation decay problem, ``|g,0>``, ``|g,1>`` and
``|e,0>``, sit at indices ``0``, ``1`` and ``n_max + 1``.

All matrices are dense complex arrays; ``hbar = 1`` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Type alias: a density matrix is a plain complex ndarray.
DensityMatrix = np.ndarray

ATOM_LABELS = {"g": 0, "e": 1}

HERMITICITY_TOL = 1e-12
POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class SpaceSpec:
    """Truncation of the cavity Fock space.

    Parameters
    ----------
    n_max : int
        Highest retained photon number. The joint dimension is
        ``2 * (n_max + 1)``.
    """

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def index(self, atom: str | int, n: int) -> int:
        a = ATOM_LABELS[atom] if isinstance(atom, str) else int(atom)
        if a not in (0, 1):
            raise ValueError(f"atom label must be g/e or 0/1, got {atom!r}")
        if not 0 <= n <= self.n_max:
            raise ValueError(f"photon number {n} outside 0..{self.n_max}")
        return a * self.n_fock + n


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """Field and atomic operators lifted to the joint space.

    ``a`` has one superdiagonal inside each atomic block;
    ``s_plus`` / ``s_minus`` are identity-valued off-diagonal blocks.
    """

    spec: SpaceSpec
    a: np.ndarray
    a_dag: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    s_z: np.ndarray
    number: np.ndarray

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    @property
    def excitation_number(self) -> np.ndarray:
        return self.number + self.s_plus @ self.s_minus

    def jc_coupling(self) -> np.ndarray:
        """``a S+ + S- a^dag``."""
        return self.a @ self.s_plus + self.s_minus @ self.a_dag


def build_space(spec: SpaceSpec | int) -> OperatorSet:
    """Build ``a, a^dag, S+, S-, Sz, a^dag a`` in the atom-major basis.

    An integer argument is taken as ``n_max``.
    """
    if not isinstance(spec, SpaceSpec):
        spec = SpaceSpec(spec)
    nf = spec.n_fock
    a_field = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), k=1).astype(complex)
    id_field = np.eye(nf, dtype=complex)

    # atom basis (g, e)
    sm_atom = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|
    sz_atom = np.diag([-0.5, 0.5]).astype(complex)
    id_atom = np.eye(2, dtype=complex)

    a = np.kron(id_atom, a_field)
    s_minus = np.kron(sm_atom, id_field)
    s_z = np.kron(sz_atom, id_field)
    a_dag = a.conj().T.copy()
    s_plus = s_minus.conj().T.copy()
    number = a_dag @ a
    for m in (a, a_dag, s_plus, s_minus, s_z, number):
        m.flags.writeable = False
    return OperatorSet(spec, a, a_dag, s_plus, s_minus, s_z, number)


def pure_state(atom_label: str, photon_number: int, spec: SpaceSpec | int) -> DensityMatrix:
    """Projector onto the basis state ``|atom_label, photon_number>``."""
    if not isinstance(spec, SpaceSpec):
        spec = SpaceSpec(spec)
    if atom_label not in ATOM_LABELS:
        raise ValueError(f"atom label must be 'g' or 'e', got {atom_label!r}")
    idx = spec.index(atom_label, photon_number)
    rho = np.zeros((spec.dim, spec.dim), dtype=complex)
    rho[idx, idx] = 1.0
    return rho


def expectation(rho: DensityMatrix, op: np.ndarray) -> complex:
    """``tr(rho @ op)``."""
    rho = np.asarray(rho)
    op = np.asarray(op)
    if rho.ndim != 2 or rho.shape != op.shape or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs op {op.shape}")
    # tr(AB) = sum_ij A_ij B_ji
    return complex(np.sum(rho * op.T))


def hermiticity_error(rho: np.ndarray) -> float:
    return float(np.max(np.abs(rho - rho.conj().T)))


def min_eigenvalue(rho: np.ndarray) -> float:
    h = 0.5 * (rho + rho.conj().T)
    return float(np.linalg.eigvalsh(h)[0])


def check_density_matrix(rho: np.ndarray, trace_tol: float = 1e-8) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit-trace and positive."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = hermiticity_error(rho)
    if herm > HERMITICITY_TOL:
        raise ValueError(f"density matrix not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    lam = min_eigenvalue(rho)
    if lam < -POSITIVITY_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lam:.3g}")
