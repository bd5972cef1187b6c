"""
Pytest fixtures voor catlab.

De toestanden zijn isotroop met de fidelities uit de experimenten
(F(rho) = 0.6, F(tau) = 0.8), zodat tests snel, deterministisch en
reproduceerbaar zijn.
"""
import numpy as np
import pytest
from hypothesis import settings

from src.models import CslaConfig, EmbezzlingSpec, ThresholdConfig
from src.quantum_core import DensityMatrix, isotropic_state

settings.register_profile("catlab", derandomize=True, max_examples=200, deadline=None)
settings.load_profile("catlab")


def random_density(seed: int, dim: int) -> DensityMatrix:
    """Willekeurige volle-rang toestand (Ginibre), vast per seed."""
    rng = np.random.default_rng(seed)
    ginibre = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    entries = ginibre @ ginibre.conj().T
    entries = (entries + entries.conj().T) / 2
    return DensityMatrix(dim, entries / np.trace(entries).real)


def diagonal_state(*values: float) -> DensityMatrix:
    return DensityMatrix(len(values), np.diag(values).astype(np.complex128))


@pytest.fixture
def rho() -> DensityMatrix:
    """Ruisige toestand met F = 0.6."""
    return isotropic_state(0.6, 2)


@pytest.fixture
def tau() -> DensityMatrix:
    """Katalysatorkopie met F = 0.8."""
    return isotropic_state(0.8, 2)


@pytest.fixture
def csla_config(rho, tau) -> CslaConfig:
    return CslaConfig(n=4, rho=rho, tau=tau, d=2)


@pytest.fixture
def threshold() -> ThresholdConfig:
    """De parameters uit de CSLA experimenten: eps = 0.05, gap = 0.2."""
    return ThresholdConfig(epsilon=0.05, f_rho=0.6, f_tau=0.8)


@pytest.fixture
def esa_threshold() -> ThresholdConfig:
    return ThresholdConfig(epsilon=0.05, f_rho=0.7)


@pytest.fixture
def small_embezzler() -> EmbezzlingSpec:
    return EmbezzlingSpec(d=2, M=4)
