"""Embezzling katalysator (ESA): permutatie, gecomprimeerde simulatie en gesloten vorm.

Alle globale toestanden in het protocol hebben de tweelingvorm
som_v a_v |v>_A |v>_B, dus we houden alleen de amplitudes van één kant bij.
Na r rondes hoort index j (0-based m = j-1) bij:

    cijfer van ronde s:  (m // d^{s-1}) % d
    katalysatorlabel:     m // d^r

De gereduceerde toestand van het hoofdsysteem van ronde r is
som c_xy |xx><yy|; twee indices interfereren alleen als ze in alle andere
registers overeenkomen.
"""
import logging
import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, Decimal, localcontext
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np
from scipy.linalg import eigvalsh

from .errors import DimensionError, StateValidationError
from .models import EmbezzlingSpec, ThresholdConfig
from .quantum_core import (
    HERMITIAN_TOL,
    PSD_TOL,
    TRACE_TOL,
    DensityMatrix,
    PureStateVector,
)

logger = logging.getLogger(__name__)

# Grens voor de dichte amplitudevector van het orakel (d^r * M)
MAX_ORACLE_ENTRIES = 10 ** 6

# Grens voor de dichte katalysatorvergelijking (M x M)
MAX_DRIFT_RANK = 4096

# Vanaf deze M geldt de Schmidt rang als niet simuleerbaar
SIMULATION_LIMIT = 10 ** 7

# log2 M tot waar de Schmidt rang als geheel getal wordt teruggegeven
EXACT_LOG2_LIMIT = 64

# Decimale precisie voor de exacte Schmidt rang
RANK_PRECISION = 60

# Blokgrootte voor de gevectoriseerde triple som
CHUNK = 1 << 20


@dataclass(frozen=True)
class IndexDecomposition:
    """Recursieve ontbinding van j in rondecijfers j_1..j_r en katalysatorrest."""
    j: int
    digits: tuple[int, ...]  # j_1, ..., j_r, elk in [1, d]
    catalyst: int  # j_C^r in [1, ceil(M / d^r)]

    @classmethod
    def decompose(cls, j: int, d: int, rounds: int) -> "IndexDecomposition":
        if j < 1 or d < 2 or rounds < 0:
            raise DimensionError(f"ongeldige ontbinding: j={j}, d={d}, r={rounds}")
        digits = tuple(
            _ceil_div(j, d ** (s - 1)) - (_ceil_div(j, d ** s) - 1) * d
            for s in range(1, rounds + 1)
        )
        return cls(j=j, digits=digits, catalyst=_ceil_div(j, d ** rounds))

    def reconstruct(self, d: int) -> int:
        rounds = len(self.digits)
        return ((self.catalyst - 1) * d ** rounds
                + sum((digit - 1) * d ** s for s, digit in enumerate(self.digits))
                + 1)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True, eq=False)
class CompressedDensity:
    """d x d coëfficiëntenmatrix van som c_xy |xx><yy| in de tweelingbasis."""
    d: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128, copy=True)
        if entries.shape != (self.d, self.d):
            raise DimensionError(f"vorm {entries.shape}, verwacht ({self.d}, {self.d})")
        if np.max(np.abs(entries - entries.conj().T)) > HERMITIAN_TOL:
            raise StateValidationError("c-matrix is niet Hermitisch")
        trace = np.trace(entries).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise StateValidationError(f"diagonaal telt op tot {trace:.15g}, verwacht 1")
        if eigvalsh(entries)[0] < -PSD_TOL:
            raise StateValidationError("c-matrix is niet positief semidefiniet")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    def fidelity(self) -> float:
        """F = (1/d) som_xy c_xy."""
        return float(np.sum(self.entries).real / self.d)

    def to_density_matrix(self) -> DensityMatrix:
        """Inbedding in de volledige d^2-dimensionale ruimte (|xx> = index x*d + x)."""
        twin = np.arange(self.d) * (self.d + 1)
        full = np.zeros((self.d ** 2, self.d ** 2), dtype=np.complex128)
        full[np.ix_(twin, twin)] = self.entries
        return DensityMatrix(self.d ** 2, full)


@dataclass(frozen=True)
class ClosedFormTerms:
    """Eén term x(s,t,h) van de triple som met zijn bereikgrenzen."""
    s: int
    t: int
    h: int
    x: float
    k_s: int
    k_st: int


@dataclass
class SchmidtRank:
    log2_m: float
    m: Optional[int]  # None als log2 M > EXACT_LOG2_LIMIT
    astronomical: bool  # M buiten bereik van elke simulatie


def schmidt_rank_for(d: int, epsilon: float) -> SchmidtRank:
    """M = ceil(d^{1/(1-sqrt(1-eps))}), het voldoende rangcriterium voor één ronde."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon = {epsilon} moet in (0, 1) liggen")
    if d < 2:
        raise DimensionError(f"d = {d} moet >= 2 zijn")
    exponent = 1.0 / (1.0 - math.sqrt(1.0 - epsilon))
    log2_m = exponent * math.log2(d)
    if log2_m > EXACT_LOG2_LIMIT:
        return SchmidtRank(log2_m=log2_m, m=None, astronomical=True)
    m = _exact_rank(d, epsilon)
    return SchmidtRank(log2_m=log2_m, m=m, astronomical=m > SIMULATION_LIMIT)


def _exact_rank(d: int, epsilon: float) -> int:
    # Boven 2^53 is een float-macht geen exact plafond meer
    with localcontext() as ctx:
        ctx.prec = RANK_PRECISION
        exponent = 1 / (1 - (1 - Decimal(str(epsilon))).sqrt())
        value = (exponent * Decimal(d).ln()).exp()
        nearest = value.to_integral_value()
        if abs(value - nearest) <= value.scaleb(-40):
            return int(nearest)
        return int(value.to_integral_value(rounding=ROUND_CEILING))


def embezzle_permutation(i: int, j: int, d: int, M: int) -> tuple[int, int]:
    """U|i>|j> = |k>|l> met l = ceil(((i-1)M + j)/d) en k = (i-1)M + j - (l-1)d."""
    if not 1 <= i <= d or not 1 <= j <= M:
        raise DimensionError(f"index (i={i}, j={j}) buiten [1,{d}] x [1,{M}]")
    linear = (i - 1) * M + j
    l = _ceil_div(linear, d)
    return linear - (l - 1) * d, l


def permutation_table(d: int, M: int) -> np.ndarray:
    """0-based vlakke vorm van U op register (hoofd, katalysator): f -> (f % d)*M + f // d."""
    flat = np.arange(d * M)
    return (flat % d) * M + flat // d


def embezzling_vector(spec: EmbezzlingSpec) -> np.ndarray:
    """Amplitudes 1/sqrt(c_M j) van |tau^E> aan één kant."""
    return 1.0 / np.sqrt(spec.c_M * np.arange(1, spec.M + 1, dtype=np.float64))


def joint_amplitudes(spec: EmbezzlingSpec, rounds: int) -> np.ndarray:
    """Eenzijdige amplitudetensor na `rounds` rondes.

    Assen: (hoofd_r, hoofd_{r-1}, ..., hoofd_1, katalysator).
    """
    if rounds < 0:
        raise ValueError(f"rounds = {rounds} moet >= 0 zijn")
    size = spec.d ** rounds * spec.M
    if size > MAX_ORACLE_ENTRIES:
        raise DimensionError(
            f"d^r * M = {size} overschrijdt {MAX_ORACLE_ENTRIES}: gebruik reduced_main_state"
        )
    perm = permutation_table(spec.d, spec.M)
    psi = embezzling_vector(spec)
    for _ in range(rounds):
        fresh = np.zeros((spec.d,) + psi.shape)
        fresh[0] = psi
        # nieuw hoofdregister naast de katalysator zetten
        moved = np.moveaxis(fresh, 0, -2)
        flat = moved.reshape(-1, spec.d * spec.M)
        out = np.empty_like(flat)
        out[:, perm] = flat
        psi = np.moveaxis(out.reshape(moved.shape), -2, 0)
    return psi


def twin_density(amplitudes: np.ndarray) -> DensityMatrix:
    """Dichte toestand |v>|v> uit eenzijdige amplitudes (registers A voor B)."""
    vector = amplitudes.reshape(-1)
    dim = vector.size
    full = np.zeros(dim * dim, dtype=np.complex128)
    full[np.arange(dim) * (dim + 1)] = vector
    return PureStateVector(dim * dim, full).density()


def simulate_rounds_oracle(spec: EmbezzlingSpec, rounds: int) -> CompressedDensity:
    """Brute-force orakel: volledige amplitudevector, dan alles behalve ronde r wegsporen."""
    if rounds < 1:
        raise ValueError(f"rounds = {rounds} moet >= 1 zijn")
    psi = joint_amplitudes(spec, rounds)
    a = psi.reshape(spec.d, -1)
    return CompressedDensity(spec.d, a @ a.conj().T)


def reduced_main_state(spec: EmbezzlingSpec, rounds: int) -> CompressedDensity:
    """Zelfde c-matrix als het orakel, in O(M d) via de indexstructuur."""
    if rounds < 1:
        raise ValueError(f"rounds = {rounds} moet >= 1 zijn")
    d, M = spec.d, spec.M
    lower = d ** (rounds - 1)
    if lower >= M:
        plateau = np.zeros((d, d))
        plateau[0, 0] = 1.0
        return CompressedDensity(d, plateau)
    m = np.arange(M, dtype=np.int64)
    digit = (m // lower) % d
    key = m % lower + lower * (m // (lower * d))
    _, group = np.unique(key, return_inverse=True)
    coefficients = np.zeros((group.max() + 1, d))
    coefficients[group, digit] = embezzling_vector(spec)
    return CompressedDensity(d, coefficients.T @ coefficients)


def _range_bounds(d: int, M: int, rounds: int, s: int, t: Optional[int] = None) -> int:
    block = d ** rounds
    lower = d ** (rounds - 1)
    if t is None:
        return min(block - lower, M - (s - 1) * block)
    return min(d - 1, (block - t) // lower, (M - (s - 1) * block - t) // lower)


def closed_form_terms(spec: EmbezzlingSpec, rounds: int) -> Iterator[ClosedFormTerms]:
    """Letterlijke drievoudige lus over (s, t, h); bedoeld voor kleine M."""
    d, M = spec.d, spec.M
    block = d ** rounds
    lower = d ** (rounds - 1)
    for s in range(1, _ceil_div(M, block) + 1):
        k_s = _range_bounds(d, M, rounds, s)
        for t in range(1, k_s + 1):
            k_st = _range_bounds(d, M, rounds, s, t)
            i = t + (s - 1) * block
            for h in range(1, k_st + 1):
                yield ClosedFormTerms(
                    s=s, t=t, h=h,
                    x=2.0 / math.sqrt(i * (i + h * lower)),
                    k_s=k_s, k_st=k_st,
                )


@lru_cache(maxsize=4096)
def _closed_form(d: int, M: int, c_M: float, rounds: int) -> float:
    lower = d ** (rounds - 1)
    if lower >= M:
        return 1.0 / d
    block = lower * d
    partials = []
    for start in range(1, M + 1, CHUNK):
        i = np.arange(start, min(start + CHUNK, M + 1), dtype=np.int64)
        t = (i - 1) % block + 1
        for h in range(1, d):
            step = h * lower
            valid = (t + step <= block) & (i + step <= M)
            if not valid.any():
                continue
            iv = i[valid].astype(np.float64)
            partials.extend((2.0 / np.sqrt(iv * (iv + step))).tolist())
    return 1.0 / d + math.fsum(partials) / (d * c_M)


def closed_form_fidelity(spec: EmbezzlingSpec, rounds: int) -> float:
    """F(rho^{E,r}) = 1/d + (1/(d c_M)) * som x(s,t,h)."""
    if rounds < 1:
        raise ValueError(f"rounds = {rounds} moet >= 1 zijn")
    return _closed_form(spec.d, spec.M, spec.c_M, rounds)


def plateau_round(d: int, M: int) -> int:
    """Eerste ronde waarin de fidelity exact 1/d is (d^{r-1} >= M)."""
    rounds = 1
    while d ** (rounds - 1) < M:
        rounds += 1
    return rounds


@dataclass
class ReuseScanStep:
    round: int
    fidelity: float
    gain: float
    passed: bool


def reuse_scan(spec: EmbezzlingSpec, thr: ThresholdConfig,
               threshold: Optional[float] = None) -> list[ReuseScanStep]:
    """Winst per ronde tot en met het plateau."""
    limit = float(thr.exact_epsilon() if threshold is None else threshold)
    steps = []
    for rounds in range(1, plateau_round(spec.d, spec.M) + 1):
        fidelity = closed_form_fidelity(spec, rounds)
        gain = fidelity - thr.f_rho
        steps.append(ReuseScanStep(rounds, fidelity, gain, gain - limit > thr.boundary_tol))
    return steps


def max_reuse_rounds_distill(spec: EmbezzlingSpec, thr: ThresholdConfig,
                             threshold: Optional[float] = None) -> int:
    """Aantal opeenvolgende rondes, vanaf r = 1, met F(rho^{E,r}) - F(rho) > drempel."""
    reusable = 0
    for step in reuse_scan(spec, thr, threshold):
        if not step.passed:
            break
        reusable = step.round
    logger.debug("r_E voor d=%d M=%d: %d", spec.d, spec.M, reusable)
    return reusable


def catalyst_state(spec: EmbezzlingSpec, rounds: int) -> np.ndarray:
    """K x K c-matrix van het katalysatorregister, K = ceil(M / d^r)."""
    block = spec.d ** rounds
    if block >= spec.M:
        return np.ones((1, 1))
    labels = _ceil_div(spec.M, block)
    padded = np.zeros(labels * block)
    padded[:spec.M] = embezzling_vector(spec)
    # rij = katalysatorlabel, kolom = rest van de hoofdregisters
    table = padded.reshape(labels, block)
    return table @ table.T


def catalyst_drift(spec: EmbezzlingSpec, rounds: int) -> tuple[float, float]:
    """(Uhlmann fidelity, trace distance) van de gebruikte katalysator t.o.v. |tau^E>."""
    if rounds < 0:
        raise ValueError(f"rounds = {rounds} moet >= 0 zijn")
    if rounds == 0:
        return 1.0, 0.0
    if spec.M > MAX_DRIFT_RANK:
        raise DimensionError(f"M = {spec.M} overschrijdt {MAX_DRIFT_RANK} voor de drift")
    used = catalyst_state(spec, rounds)
    tau = embezzling_vector(spec)
    size = used.shape[0]
    overlap = float(tau[:size] @ used @ tau[:size])
    fidelity = math.sqrt(min(1.0, max(0.0, overlap)))
    difference = -np.outer(tau, tau)
    difference[:size, :size] += used
    distance = 0.5 * float(np.sum(np.abs(eigvalsh(difference))))
    return fidelity, min(1.0, distance)
