"""Configuratiemodellen voor catlab (pydantic).

De numerieke waardetypes (DensityMatrix, LabeledMixture, ...) staan in de
modules die ze gebruiken; hier staan de parameters die door de protocollen,
de sweeps en de CLI heen worden doorgegeven.
"""
import math
import operator
from fractions import Fraction
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import digamma

from .quantum_core import DensityMatrix

# Tolerantie voor de harmonische normalisatie c_M
HARMONIC_TOL = 1e-12

# Tot deze M wordt c_M exact (gecompenseerd) opgeteld, daarboven via digamma
HARMONIC_EXACT_LIMIT = 1_000_000


def exact_decimal(value: float) -> Fraction:
    """Rationale waarde zoals de gebruiker hem intypte (0.05 -> 1/20)."""
    return Fraction(str(value))


def harmonic_number(m: int) -> float:
    """c_M = som_{j=1}^{M} 1/j."""
    if m <= HARMONIC_EXACT_LIMIT:
        return math.fsum(1.0 / np.arange(1, m + 1, dtype=np.float64))
    return float(digamma(m + 1) + np.euler_gamma)


class ThresholdConfig(BaseModel):
    """Drempel en basisfidelities die alle herbruikbaarheidsbeslissingen sturen."""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0.0, lt=1.0)  # Minimale fidelity-winst per ronde
    f_rho: float = Field(ge=0.0, le=1.0)  # F(rho) van de ruisige toestand
    f_tau: float = Field(0.0, ge=0.0, le=1.0)  # F(tau), alleen nodig voor CSLA
    boundary_tol: float = Field(1e-12, ge=0.0)

    @property
    def gap(self) -> float:
        return self.f_tau - self.f_rho

    def exact_epsilon(self) -> Fraction:
        return exact_decimal(self.epsilon)

    def exact_gap(self) -> Fraction:
        return exact_decimal(self.f_tau) - exact_decimal(self.f_rho)

    def teleport_threshold(self, d: int) -> Fraction:
        """Effectieve drempel (d+1)*eps/d op de verstrengelingsfidelity."""
        return self.exact_epsilon() * (d + 1) / d


class CslaConfig(BaseModel):
    """Parameters van de convex-split katalysator tau^{(x)(n-1)}."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(ge=2)
    rho: DensityMatrix
    tau: DensityMatrix
    d: int = Field(ge=2)

    @model_validator(mode="after")
    def _check_dims(self) -> "CslaConfig":
        for name, state in (("rho", self.rho), ("tau", self.tau)):
            if state.dim != self.d ** 2:
                raise ValueError(
                    f"{name} heeft dimensie {state.dim}, verwacht d^2 = {self.d ** 2}"
                )
        return self


class EmbezzlingSpec(BaseModel):
    """Embezzling toestand met Schmidt rang M op lokale dimensie d."""
    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=2)
    M: int = Field(ge=1)
    c_M: float = 0.0

    @model_validator(mode="before")
    @classmethod
    def _fill_normalizer(cls, data):
        if not isinstance(data, dict):
            return data
        try:
            m = operator.index(data.get("M"))
        except TypeError:
            return data
        if m < 1:
            return data
        expected = harmonic_number(m)
        given = data.get("c_M")
        if not given:
            return {**data, "c_M": expected}
        if abs(given - expected) > HARMONIC_TOL * max(1.0, expected):
            raise ValueError(f"c_M = {given} is niet het {m}-de harmonische getal")
        return data


class SweepSpec(BaseModel):
    """Parameterrooster voor een figuur-sweep."""
    model_config = ConfigDict(frozen=True)

    protocol: Literal["csla", "esa"]
    task: Literal["distill", "teleport"]
    d_values: list[int] = Field(default_factory=lambda: [2])
    n_values: list[int] = Field(default_factory=lambda: [4])
    m_values: list[int] = Field(default_factory=lambda: [1000])
    rounds: list[int] = Field(default_factory=lambda: list(range(1, 11)))
    epsilons: list[float] = Field(default_factory=lambda: [0.05])
    f_rho_values: list[float] = Field(default_factory=lambda: [0.6])
    f_tau: float = Field(0.8, ge=0.0, le=1.0)
    seed: int = 2024
    mc_samples: int = Field(0, ge=0)  # > 0: Monte Carlo kolom bij teleport, d = 2
    out: Optional[str] = None

    @field_validator("d_values", "n_values", "m_values", "rounds", "epsilons", "f_rho_values")
    @classmethod
    def _non_empty(cls, values: list):
        if not values:
            raise ValueError("elk rooster moet minstens één waarde bevatten")
        return values

    @field_validator("d_values")
    @classmethod
    def _check_d(cls, values: list[int]):
        if any(d < 2 for d in values):
            raise ValueError("d moet >= 2 zijn")
        return values

    @field_validator("n_values")
    @classmethod
    def _check_n(cls, values: list[int]):
        if any(n < 2 for n in values):
            raise ValueError("n moet >= 2 zijn")
        return values

    @field_validator("m_values", "rounds")
    @classmethod
    def _check_positive(cls, values: list[int]):
        if any(v < 1 for v in values):
            raise ValueError("M en r moeten >= 1 zijn")
        return values

    @field_validator("epsilons")
    @classmethod
    def _check_epsilon(cls, values: list[float]):
        if any(not 0.0 < e < 1.0 for e in values):
            raise ValueError("epsilon moet in (0, 1) liggen")
        return values

    @field_validator("f_rho_values")
    @classmethod
    def _check_fidelity(cls, values: list[float]):
        if any(not 0.0 <= f <= 1.0 for f in values):
            raise ValueError("fidelities moeten in [0, 1] liggen")
        return values
