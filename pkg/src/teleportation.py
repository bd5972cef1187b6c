"""Katalytische teleportatie.

De gemiddelde teleportatiefidelity hangt alleen af van de
verstrengelingsfidelity: f = (F d + 1) / (d + 1). Een katalytische ronde
verbetert f dus met d/(d+1) keer de verbetering van F, waardoor de drempel
op F effectief (d+1) eps / d wordt.

Voor qubits (d = 2) staat hier ook een orakel dat standaardteleportatie
uitvoert (Bell-meting plus Pauli-correctie) en de relatie numeriek toetst.
"""
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import csla, esa
from .errors import DimensionError
from .models import EmbezzlingSpec, ThresholdConfig
from .quantum_core import DensityMatrix, PureStateVector, maximally_entangled_vector

logger = logging.getLogger(__name__)

# Pauli-matrices I, X, Z, Y; Bell-toestand k is (I (x) P_k)|phi+>
PAULIS = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
)


@dataclass
class TeleportOutcome:
    average_fidelity: float
    rounds: int
    protocol_tag: Literal["standard", "csla", "esa"]
    ent_fidelity: float


@dataclass
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int

    def agrees_with(self, expected: float, sigmas: float = 3.0, floor: float = 1e-9) -> bool:
        """|mean - expected| binnen sigmas standaardfouten (minimaal floor)."""
        return abs(self.mean - expected) <= max(sigmas * self.stderr, floor)


def avg_fidelity_from_ent_fidelity(fidelity: float, d: int) -> float:
    """f = (F d + 1) / (d + 1)."""
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"F = {fidelity} ligt buiten [0, 1]")
    if d < 2:
        raise DimensionError(f"d = {d} moet >= 2 zijn")
    return (fidelity * d + 1.0) / (d + 1.0)


def standard_teleport_fidelity(thr: ThresholdConfig, d: int) -> TeleportOutcome:
    """Niet-katalytische basislijn met rho zelf als bron."""
    return TeleportOutcome(avg_fidelity_from_ent_fidelity(thr.f_rho, d), 0, "standard", thr.f_rho)


def catalytic_teleport_fidelity_csla(thr: ThresholdConfig, n: int, rounds: int, d: int) -> TeleportOutcome:
    """Distillatie met de CSLA katalysator, gevolgd door standaardteleportatie."""
    fidelity = thr.f_rho + csla.fidelity_gain(thr, n, rounds)
    return TeleportOutcome(avg_fidelity_from_ent_fidelity(fidelity, d), rounds, "csla", fidelity)


def catalytic_teleport_fidelity_esa(spec: EmbezzlingSpec, rounds: int) -> TeleportOutcome:
    """Teleportatie met de ESA-uitvoer van ronde `rounds` als bron."""
    fidelity = esa.closed_form_fidelity(spec, rounds)
    return TeleportOutcome(avg_fidelity_from_ent_fidelity(fidelity, spec.d), rounds, "esa", fidelity)


def teleport_reuse_bound_csla(thr: ThresholdConfig, n: int, d: int) -> csla.ReuseBound:
    return csla.reuse_bound(thr, n, threshold=thr.teleport_threshold(d))


def max_reuse_rounds_teleport_csla(thr: ThresholdConfig, n: int, d: int) -> int:
    """r_CS voor teleportatie: de distillatiegrens bij drempel (d+1) eps / d."""
    return teleport_reuse_bound_csla(thr, n, d).guarded


def max_reuse_rounds_teleport_esa(spec: EmbezzlingSpec, thr: ThresholdConfig) -> int:
    """r_E voor teleportatie: scan tot het plateau bij drempel (d+1) eps / d."""
    return esa.max_reuse_rounds_distill(spec, thr, threshold=float(thr.teleport_threshold(spec.d)))


def _bell_projectors() -> list[np.ndarray]:
    phi = maximally_entangled_vector(2)
    projectors = []
    for pauli in PAULIS:
        bell = np.kron(np.eye(2), pauli) @ phi
        projectors.append(np.outer(bell, bell.conj()))
    return projectors


BELL_PROJECTORS = _bell_projectors()

# Correctie na uitkomst k is P_k^T
CORRECTIONS = [pauli.T for pauli in PAULIS]


def _check_qubit_resource(resource: DensityMatrix) -> None:
    if resource.dim != 4:
        raise DimensionError(f"bron heeft dimensie {resource.dim}, het orakel verwacht twee qubits")


def _teleport_map(message_operator: np.ndarray, resource: np.ndarray) -> np.ndarray:
    """Uitvoer bij Bob, gesommeerd over de vier gecorrigeerde uitkomsten.

    Lineair in message_operator, dus ook bruikbaar op matrixeenheden.
    """
    joint = np.kron(message_operator, resource)  # registers M, A, B
    output = np.zeros((2, 2), dtype=np.complex128)
    for projector, correction in zip(BELL_PROJECTORS, CORRECTIONS):
        full = np.kron(projector, np.eye(2))
        branch = (full @ joint @ full).reshape(4, 2, 4, 2)
        bob = np.einsum("aiaj->ij", branch)
        output += correction @ bob @ correction.conj().T
    return output


def simulate_standard_teleportation(resource: DensityMatrix, message: PureStateVector, d: int = 2) -> float:
    """<psi| Theta_0(psi) |psi> voor standaardteleportatie met de gegeven bron."""
    if d != 2:
        raise DimensionError("het Bell-meting orakel ondersteunt alleen d = 2")
    _check_qubit_resource(resource)
    if message.dim != 2:
        raise DimensionError(f"bericht heeft dimensie {message.dim}, verwacht 2")
    psi = message.amplitudes
    output = _teleport_map(np.outer(psi, psi.conj()), resource.entries)
    return float(np.vdot(psi, output @ psi).real)


def transfer_tensor(resource: DensityMatrix) -> np.ndarray:
    """T[a, b, i, j] = <i| Theta_0(|a><b|) |j>."""
    _check_qubit_resource(resource)
    tensor = np.zeros((2, 2, 2, 2), dtype=np.complex128)
    for a in range(2):
        for b in range(2):
            unit = np.zeros((2, 2), dtype=np.complex128)
            unit[a, b] = 1.0
            tensor[a, b] = _teleport_map(unit, resource.entries)
    return tensor


def haar_states(count: int, d: int, seed: int) -> np.ndarray:
    """Haar-verdeelde zuivere toestanden: genormaliseerde complexe Gauss-vectoren."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def haar_average_teleportation(resource: DensityMatrix, samples: int, seed: int) -> MonteCarloEstimate:
    """Monte Carlo gemiddelde van de uitvoerfidelity over Haar-berichten."""
    if samples < 2:
        raise ValueError("minstens twee samples nodig voor een standaardfout")
    tensor = transfer_tensor(resource)
    psi = haar_states(samples, 2, seed)
    values = np.einsum("sa,sb,abij,si,sj->s", psi, psi.conj(), tensor, psi.conj(), psi).real
    estimate = MonteCarloEstimate(
        mean=float(values.mean()),
        stderr=float(values.std(ddof=1) / np.sqrt(samples)),
        samples=samples,
    )
    logger.debug("Haar MC: %d samples, gemiddelde %.6f +- %.2g", samples, estimate.mean, estimate.stderr)
    return estimate


def exact_average_teleportation(resource: DensityMatrix) -> float:
    """Exact Haar-gemiddelde via de tweede momenten van zuivere toestanden."""
    tensor = transfer_tensor(resource)
    d = 2
    total = np.einsum("aaii->", tensor) + np.einsum("abab->", tensor)
    return float(total.real / (d * (d + 1)))
