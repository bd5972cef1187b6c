"""Dichte lineaire algebra op kleine Hilbertruimtes.

Bevat de toestandstypes (DensityMatrix, PureStateVector) en de scalaire
functionalen die de protocolmodules gebruiken: verstrengelingsfidelity,
trace- en purified distance, max-relatieve entropie en partiële trace.

Basisconventie: computationele basis, |i>|j> <-> index i*d + j, 0-based.
"""
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import eigh, eigvalsh, svdvals

from .errors import DimensionError, StateValidationError, SupportError

# Toleranties voor toestandsvalidatie
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12

# Eigenwaarden kleiner dan dit tellen niet mee in de support
SUPPORT_TOL = 1e-10


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Spoor-één, positief semidefiniete complexe matrix."""
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.shape != (self.dim, self.dim):
            raise DimensionError(
                f"matrix heeft vorm {entries.shape}, verwacht ({self.dim}, {self.dim})"
            )
        if np.max(np.abs(entries - entries.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise StateValidationError("matrix is niet Hermitisch")
        trace = np.trace(entries)
        if abs(trace - 1.0) > TRACE_TOL:
            raise StateValidationError(f"spoor is {trace.real:.15g}, verwacht 1")
        min_eig = eigvalsh(entries)[0]
        if min_eig < -PSD_TOL:
            raise StateValidationError(f"kleinste eigenwaarde {min_eig:.3g} is negatief")
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True, eq=False)
class PureStateVector:
    """Genormaliseerde toestandsvector."""
    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.shape != (self.dim,):
            raise DimensionError(f"vector heeft vorm {amplitudes.shape}, verwacht ({self.dim},)")
        norm = np.vdot(amplitudes, amplitudes).real
        if abs(norm - 1.0) > NORM_TOL:
            raise StateValidationError(f"kwadratische norm is {norm:.15g}, verwacht 1")
        object.__setattr__(self, "amplitudes", amplitudes)

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.dim, np.outer(self.amplitudes, self.amplitudes.conj()))


def _check_local_dim(d: int) -> None:
    if d < 2:
        raise DimensionError(f"lokale dimensie d = {d}, moet >= 2 zijn")


def _check_same_dim(a: DensityMatrix, b: DensityMatrix) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimensies verschillen: {a.dim} vs {b.dim}")


def basis_state(dim: int, index: int) -> DensityMatrix:
    """|index><index| op een ruimte van dimensie dim."""
    entries = np.zeros((dim, dim), dtype=np.complex128)
    entries[index, index] = 1.0
    return DensityMatrix(dim, entries)


def maximally_mixed_state(dim: int) -> DensityMatrix:
    return DensityMatrix(dim, np.eye(dim, dtype=np.complex128) / dim)


def maximally_entangled_vector(d: int) -> np.ndarray:
    """(1/sqrt d) som_i |ii>."""
    _check_local_dim(d)
    vector = np.zeros(d * d, dtype=np.complex128)
    vector[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return vector


def maximally_entangled_state(d: int) -> DensityMatrix:
    """Projector phi+_d op de d^2-dimensionale ruimte."""
    vector = maximally_entangled_vector(d)
    return DensityMatrix(d * d, np.outer(vector, vector.conj()))


def entanglement_fidelity(state: DensityMatrix, d: int) -> float:
    """F(rho) = Tr[rho phi+_d]."""
    _check_local_dim(d)
    if state.dim != d * d:
        raise DimensionError(f"toestand heeft dimensie {state.dim}, verwacht d^2 = {d * d}")
    vector = maximally_entangled_vector(d)
    return float(np.vdot(vector, state.entries @ vector).real)


def isotropic_state(target_fidelity: float, d: int) -> DensityMatrix:
    """p*phi+_d + (1-p)*I/d^2 met verstrengelingsfidelity target_fidelity."""
    _check_local_dim(d)
    floor = 1.0 / d ** 2
    if not floor <= target_fidelity <= 1.0:
        raise StateValidationError(
            f"fidelity {target_fidelity} ligt buiten [1/d^2, 1] = [{floor:.6g}, 1]"
        )
    p = (target_fidelity - floor) / (1.0 - floor)
    entries = (p * maximally_entangled_state(d).entries
               + (1.0 - p) * np.eye(d * d, dtype=np.complex128) / d ** 2)
    return DensityMatrix(d * d, entries)


def mix(weights: Sequence[float], states: Sequence[DensityMatrix]) -> DensityMatrix:
    """Convexe combinatie; de gewichten worden genormaliseerd."""
    if len(weights) != len(states) or not states:
        raise DimensionError("evenveel gewichten als toestanden nodig")
    for state in states[1:]:
        _check_same_dim(states[0], state)
    total = float(sum(weights))
    entries = sum((float(w) / total) * s.entries for w, s in zip(weights, states))
    return DensityMatrix(states[0].dim, entries)


def tensor(states: Iterable[DensityMatrix]) -> DensityMatrix:
    """Tensorproduct in de opgegeven volgorde."""
    entries = reduce(np.kron, (s.entries for s in states))
    return DensityMatrix(entries.shape[0], entries)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) * som van de singuliere waarden van a - b."""
    _check_same_dim(a, b)
    return float(min(1.0, 0.5 * np.sum(svdvals(a.entries - b.entries))))


def _psd_sqrt(entries: np.ndarray) -> np.ndarray:
    values, vectors = eigh(entries)
    values = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * values) @ vectors.conj().T


def uhlmann_fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Wortel-fidelity ||sqrt(a) sqrt(b)||_1."""
    _check_same_dim(a, b)
    overlap = np.sum(svdvals(_psd_sqrt(a.entries) @ _psd_sqrt(b.entries)))
    return float(np.clip(overlap, 0.0, 1.0))


def purified_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """sqrt(1 - F_U(a, b)^2)."""
    fidelity = uhlmann_fidelity(a, b)
    return float(np.sqrt(max(0.0, 1.0 - fidelity ** 2)))


def max_relative_entropy(rho: DensityMatrix, tau: DensityMatrix) -> float:
    """D_max(rho || tau) in bits.

    log2 van de grootste eigenwaarde van tau^{-1/2} rho tau^{-1/2}, met de
    pseudo-inverse op de support van tau. Valt rho buiten die support, dan
    is de entropie oneindig en volgt een SupportError.
    """
    _check_same_dim(rho, tau)
    values, vectors = eigh(tau.entries)
    support = values > SUPPORT_TOL
    outside = vectors[:, ~support]
    if outside.shape[1]:
        leak = eigvalsh(outside.conj().T @ rho.entries @ outside)[-1]
        if leak > SUPPORT_TOL:
            raise SupportError("oneindige max-relatieve entropie: supp(rho) niet in supp(tau)")
    inner = vectors[:, support] / np.sqrt(values[support])
    ratio = eigvalsh(inner.conj().T @ rho.entries @ inner)[-1]
    return max(0.0, float(np.log2(ratio)))


def partial_trace(state: DensityMatrix, dims: Sequence[int], keep: Iterable[int]) -> DensityMatrix:
    """Gereduceerde toestand op de factoren in keep (0-based)."""
    dims = [int(x) for x in dims]
    keep = sorted(set(keep))
    if int(np.prod(dims)) != state.dim:
        raise DimensionError(f"product van dims {dims} is niet {state.dim}")
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"ongeldige factoren {keep} voor {len(dims)} factoren")
    tensor_form = state.entries.reshape(dims + dims)
    remaining = len(dims)
    for axis in reversed(range(len(dims))):
        if axis in keep:
            continue
        tensor_form = np.trace(tensor_form, axis1=axis, axis2=axis + remaining)
        remaining -= 1
    kept_dim = int(np.prod([dims[i] for i in keep]))
    return DensityMatrix(kept_dim, tensor_form.reshape(kept_dim, kept_dim))
