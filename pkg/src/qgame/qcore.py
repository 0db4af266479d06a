"""Dense complex linear algebra for one- and two-qubit objects.

Convention used everywhere in this package: two-qubit amplitudes are
ordered |00>, |01>, |10>, |11>.  The first qubit belongs to player one,
the second to player two.  Gate matrices are 4x4 complex in the same
ordering, applied on the left of column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class QGameError(Exception):
    """Base class for errors raised by this package."""


class NormalizationError(QGameError):
    """A state vector is not normalized within tolerance."""


class UnitarityError(QGameError):
    """A matrix is not unitary within tolerance."""


@dataclass(frozen=True)
class Tolerances:
    """Central numeric tolerances.

    Every magic epsilon in the package lives here so the relationships
    between them stay visible: state normalization is the tightest,
    unitarity is looser because it accumulates over a 4x4 product, and
    the equilibrium slack dominates both.
    """

    state_norm: float = 1e-12          # | sum |amp|^2 - 1 | for state vectors
    unitarity: float = 1e-10           # entrywise max of |U^H U - I|
    equilibrium: float = 1e-9          # default slack when comparing amplitudes
    degenerate_coefficient: float = 1e-10  # coefficient treated as zero in region math
    completion_residual: float = 1e-8  # Gram-Schmidt seed rejection cutoff
    payoff_dedup: float = 1e-6         # payoff-vector proximity for de-duplication
    amplitude_input: float = 1e-6      # accepted normalization drift on CLI input
    disc: float = 1e-12                # slack for unit-disc membership checks


TOL = Tolerances()


def _as_complex_vector(values, size: int, what: str) -> np.ndarray:
    v = np.asarray(values, dtype=complex).reshape(-1)
    if v.shape != (size,):
        raise NormalizationError(f"{what} must have exactly {size} amplitudes, got shape {np.shape(values)}")
    if not np.all(np.isfinite(v)):
        raise NormalizationError(f"{what} contains non-finite amplitudes")
    return v


@dataclass(frozen=True, eq=False)
class QubitState:
    """A normalized single-qubit state (x, y) = amplitudes of |0>, |1>."""

    vec: np.ndarray

    def __post_init__(self):
        v = _as_complex_vector(self.vec, 2, "qubit state")
        norm_sq = float(np.sum(np.abs(v) ** 2))
        if abs(norm_sq - 1.0) > TOL.state_norm:
            raise NormalizationError(f"qubit state norm^2 = {norm_sq!r} deviates from 1 by more than {TOL.state_norm}")
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)

    @property
    def x(self) -> complex:
        return complex(self.vec[0])

    @property
    def y(self) -> complex:
        return complex(self.vec[1])

    @classmethod
    def from_amplitudes(cls, x: complex, y: complex) -> "QubitState":
        return cls(np.array([x, y], dtype=complex))

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "QubitState":
        """State (cos(theta/2), e^{i phi} sin(theta/2)); global phase fixed real on |0>."""
        return cls(np.array([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)]))


KET0 = QubitState(np.array([1.0, 0.0], dtype=complex))
KET1 = QubitState(np.array([0.0, 1.0], dtype=complex))


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """A normalized two-qubit state vector in the |00>,|01>,|10>,|11> ordering."""

    vec: np.ndarray

    def __post_init__(self):
        v = _as_complex_vector(self.vec, 4, "two-qubit state")
        norm_sq = float(np.sum(np.abs(v) ** 2))
        if abs(norm_sq - 1.0) > TOL.state_norm:
            raise NormalizationError(f"two-qubit state norm^2 = {norm_sq!r} deviates from 1 by more than {TOL.state_norm}")
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)

    def amplitude(self, index: int) -> complex:
        return complex(self.vec[index])


def unitarity_deviation(mat: np.ndarray) -> float:
    """Max entrywise modulus of U^H U - I."""
    m = np.asarray(mat, dtype=complex)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def check_unitary(mat: np.ndarray, tol: float = TOL.unitarity) -> bool:
    """True when mat is 4x4, finite, and U^H U = I entrywise within tol."""
    m = np.asarray(mat, dtype=complex)
    if m.shape != (4, 4) or not np.all(np.isfinite(m)):
        return False
    return unitarity_deviation(m) <= tol


@dataclass(frozen=True, eq=False)
class GameUnitary:
    """A 4x4 unitary acting on the joint two-qubit space."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (4, 4):
            raise UnitarityError(f"game unitary must be 4x4, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise UnitarityError("game unitary contains non-finite entries")
        deviation = unitarity_deviation(m)
        if deviation > TOL.unitarity:
            raise UnitarityError(
                f"unitarity violated: max |U^H U - I| entry = {deviation:.3e} exceeds {TOL.unitarity}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)


def tensor(a: QubitState, b: QubitState) -> TwoQubitState:
    """Joint state of the two players, (a.x b.x, a.x b.y, a.y b.x, a.y b.y)."""
    return TwoQubitState(np.kron(a.vec, b.vec))


def apply(u: GameUnitary, s: TwoQubitState) -> TwoQubitState:
    """Left-multiply s by u.

    A matrix that only satisfies unitarity to 1e-10 can drift the product
    norm past the 1e-12 state tolerance; that drift is absorbed by exact
    renormalization here rather than rejected.
    """
    v = u.mat @ s.vec
    norm_sq = float(np.sum(np.abs(v) ** 2))
    if abs(norm_sq - 1.0) > TOL.state_norm:
        if abs(norm_sq - 1.0) > 1e-9:
            raise NormalizationError(f"applying unitary produced norm^2 = {norm_sq!r}")
        v = v / np.sqrt(norm_sq)
    return TwoQubitState(v)


def _project_out(v: np.ndarray, columns: list[np.ndarray]) -> np.ndarray:
    # Two Gram-Schmidt passes keep orthogonality near machine precision
    # even when the raw residual is close to the rejection cutoff.
    r = v.astype(complex)
    for _ in range(2):
        for c in columns:
            r = r - np.vdot(c, r) * c
    return r


def complete_unitary(first_column: TwoQubitState) -> GameUnitary:
    """Deterministic orthonormal completion of a unit vector to a 4x4 unitary.

    Remaining columns are seeded with the canonical basis vectors in
    ascending index order; a seed is skipped when its residual after
    projection falls below the completion cutoff.
    """
    cols = [first_column.vec.astype(complex)]
    for k in range(4):
        if len(cols) == 4:
            break
        residual = _project_out(np.eye(4, dtype=complex)[k], cols)
        norm = float(np.linalg.norm(residual))
        if norm >= TOL.completion_residual:
            cols.append(residual / norm)
    if len(cols) != 4:
        raise QGameError("orthonormal completion exhausted all canonical seeds")
    return GameUnitary(np.column_stack(cols))


def random_unitary(rng: np.random.Generator) -> GameUnitary:
    """Random 4x4 unitary from QR of a complex standard-normal matrix.

    Column phases are fixed by the sign of the R diagonal so the
    distribution does not depend on the QR sign convention.
    """
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return GameUnitary(q * (d / np.abs(d)))


def random_qubit_state(rng: np.random.Generator) -> QubitState:
    """Random qubit state, uniform on the sphere of normalized amplitude pairs."""
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return QubitState(z / np.linalg.norm(z))
