"""Convex-split katalysator (CSLA): symbolische simulatie en gesloten vormen.

De katalysator is tau^{(x)(n-1)}. Elke ronde zet de verse hoofdtoestand rho
met gelijke kans op één van de n posities (hoofdslot plus n-1
katalysatorslots). Omdat alleen de labels R (rho) en T (tau) rondgeschoven
worden, simuleren we de toestand als een mixture van labelreeksen met exacte
rationale gewichten. Dat is het brute-force orakel voor de gesloten vorm

    rho^{CS,r} = ((n^r - (n-1)^r) rho + (n-1)^r tau) / n^r.

Slotindeling (0-based posities): posities 0..n-2 zijn katalysatorslots 1..n-1,
positie n-2+t is het hoofdslot van ronde t (slotnummer n+t-1).
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import BranchOverflowError, DimensionError, NoCatalyticGainError
from .models import CslaConfig, ThresholdConfig, exact_decimal
from .quantum_core import (
    DensityMatrix,
    entanglement_fidelity,
    isotropic_state,
    max_relative_entropy,
    mix,
    partial_trace,
    tensor,
    trace_distance,
    uhlmann_fidelity,
)

logger = logging.getLogger(__name__)

RHO = "R"
TAU = "T"
LABELS = (RHO, TAU)

# Bovengrens op n^rounds voor het symbolische orakel
MAX_BRANCHES = 10 ** 6

# Bovengrens op de totale dimensie bij dichte realisatie
MAX_REALIZED_DIM = 4096

# Marge in log-ruimte waarbinnen de strikte ongelijkheid exact wordt beslist
LOG_MARGIN = 1e-9

# Tot deze r wordt een grensgeval met breuken uitgerekend
EXACT_ROUNDS_LIMIT = 10_000


@dataclass(frozen=True)
class IndexPair:
    """lambda(sigma) = [x1, x2]: aantal rho-labels en tau-labels."""
    x1: int
    x2: int

    def __add__(self, other: "IndexPair") -> "IndexPair":
        return IndexPair(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "IndexPair") -> "IndexPair":
        return IndexPair(self.x1 - other.x1, self.x2 - other.x2)

    def __rmul__(self, factor: int) -> "IndexPair":
        return IndexPair(factor * self.x1, factor * self.x2)

    @property
    def total(self) -> int:
        return self.x1 + self.x2


@dataclass(frozen=True)
class LabeledMixture:
    """Convexe mixture van labelreeksen over {R, T} met exacte gewichten.

    De eerste n_catalyst posities zijn katalysatorslots.
    """
    n_slots: int
    n_catalyst: int
    branches: Mapping[tuple[str, ...], Fraction]

    def __post_init__(self):
        if self.n_slots < 1:
            raise DimensionError("een mixture heeft minstens één slot nodig")
        if not 0 <= self.n_catalyst <= self.n_slots:
            raise DimensionError(f"n_catalyst = {self.n_catalyst} past niet in {self.n_slots} slots")
        for labels in self.branches:
            if len(labels) != self.n_slots or any(lab not in LABELS for lab in labels):
                raise DimensionError(f"ongeldige labelreeks {labels}")
        if sum(self.branches.values(), Fraction(0)) != 1:
            raise ValueError("gewichten van de mixture tellen niet op tot 1")
        object.__setattr__(self, "branches", dict(self.branches))

    @classmethod
    def single(cls, labels: Sequence[str], n_catalyst: int = 0) -> "LabeledMixture":
        labels = tuple(labels)
        return cls(len(labels), n_catalyst, {labels: Fraction(1)})

    def distribution(self, slot: int) -> dict[str, Fraction]:
        """Labelverdeling op één positie."""
        if not 0 <= slot < self.n_slots:
            raise DimensionError(f"slot {slot} bestaat niet")
        result = {RHO: Fraction(0), TAU: Fraction(0)}
        for labels, weight in self.branches.items():
            result[labels[slot]] += weight
        return result

    def marginal(self, slots: Sequence[int]) -> "LabeledMixture":
        """Mixture op een deelverzameling posities (symbolische partiële trace)."""
        slots = list(slots)
        reduced: dict[tuple[str, ...], Fraction] = {}
        for labels, weight in self.branches.items():
            key = tuple(labels[s] for s in slots)
            reduced[key] = reduced.get(key, Fraction(0)) + weight
        kept_catalyst = sum(1 for s in slots if s < self.n_catalyst)
        return LabeledMixture(len(slots), kept_catalyst, reduced)

    def index_pair(self, slots: Sequence[int], scale: int) -> IndexPair:
        """Ongenormaliseerd indexpaar: scale * verwacht aantal R- en T-labels."""
        x1 = Fraction(0)
        x2 = Fraction(0)
        for labels, weight in self.branches.items():
            rho_count = sum(1 for s in slots if labels[s] == RHO)
            x1 += weight * rho_count
            x2 += weight * (len(slots) - rho_count)
        x1 *= scale
        x2 *= scale
        if x1.denominator != 1 or x2.denominator != 1:
            raise ValueError(f"indexpaar is niet geheel: [{x1}, {x2}]")
        return IndexPair(int(x1), int(x2))

    def render(self) -> dict[str, Fraction]:
        """Leesbare vorm: hoogste slot links, zoals tau_n (x) ... (x) tau_1."""
        return {"".join(reversed(labels)): w for labels, w in sorted(self.branches.items())}


@dataclass
class RoundSnapshot:
    """Toestand van het orakel na ronde t."""
    round: int
    main_distribution: dict[str, Fraction]
    catalyst_pair: IndexPair
    main_pairs: list[IndexPair]
    branch_count: int  # Verschillende labelreeksen na samenvoegen
    term_count: int  # Termen met multipliciteit, n^t
    mixture: LabeledMixture = field(repr=False)


@dataclass
class ReuseBound:
    """Maximaal aantal herbruikbare rondes, ruw en bewaakt."""
    raw: int  # Floor van de logaritmische formule
    guarded: int  # Gecontroleerd tegen de strikte ongelijkheid
    ratio: float  # Argument van de floor
    threshold: Fraction

    @property
    def differs(self) -> bool:
        return self.raw != self.guarded


@dataclass
class CatalystDesign:
    """Constructie van de convex-split katalysator bij drempel epsilon."""
    tau: DensityMatrix
    k: float  # D_max(rho || tau) in bits
    n: int


def required_copies(epsilon: float, k: float) -> int:
    """n = ceil(2^{k+2} / epsilon), met willekeurige precisie."""
    if epsilon <= 0:
        raise ValueError(f"epsilon = {epsilon} moet positief zijn")
    if k < 0:
        raise ValueError(f"k = {k} moet >= 0 zijn")
    whole = math.floor(k)
    frac = k - whole
    power = Fraction(2) ** (whole + 2)
    if frac:
        power *= Fraction(2.0 ** frac)
    return math.ceil(power / exact_decimal(epsilon))


def design_catalyst(rho: DensityMatrix, epsilon: float, d: int) -> CatalystDesign:
    """Kies tau isotroop met F(tau) = 1 - epsilon/4 en bepaal k en n."""
    tau = isotropic_state(1.0 - epsilon / 4.0, d)
    k = max_relative_entropy(rho, tau)
    return CatalystDesign(tau=tau, k=k, n=required_copies(epsilon, k))


def initial_mixture(n: int, rounds: int) -> LabeledMixture:
    """tau^{(x)(n-1)} naast `rounds` verse kopieën van rho."""
    if n < 2:
        raise DimensionError(f"n = {n} moet >= 2 zijn")
    return LabeledMixture.single((TAU,) * (n - 1) + (RHO,) * rounds, n_catalyst=n - 1)


def main_slot(n: int, round_index: int) -> int:
    """Positie van het hoofdslot van ronde round_index (1-based)."""
    return n - 2 + round_index


def convex_split_round(state: LabeledMixture, round_slot: int) -> LabeledMixture:
    """Eén toepassing van de convex-split afbeelding op round_slot.

    Elke tak splitst in n takken met gewicht 1/n: de identiteit en de
    verwisseling van round_slot met elk katalysatorslot. Gelijke reeksen
    worden samengevoegd.
    """
    if not state.n_catalyst <= round_slot < state.n_slots:
        raise DimensionError(f"slot {round_slot} is geen hoofdslot")
    if any(labels[round_slot] != RHO for labels in state.branches):
        raise DimensionError(f"slot {round_slot} draagt geen verse rho")
    share = Fraction(1, state.n_catalyst + 1)
    result: dict[tuple[str, ...], Fraction] = {}
    for labels, weight in state.branches.items():
        part = weight * share
        result[labels] = result.get(labels, Fraction(0)) + part
        for catalyst in range(state.n_catalyst):
            swapped = list(labels)
            swapped[round_slot], swapped[catalyst] = swapped[catalyst], swapped[round_slot]
            key = tuple(swapped)
            result[key] = result.get(key, Fraction(0)) + part
    return LabeledMixture(state.n_slots, state.n_catalyst, result)


def simulate_labels(n: int, rounds: int) -> list[RoundSnapshot]:
    """Symbolisch orakel: exacte labelverdelingen en indexparen per ronde."""
    if rounds < 1:
        raise ValueError(f"rounds = {rounds} moet >= 1 zijn")
    if n ** rounds > MAX_BRANCHES:
        raise BranchOverflowError(
            f"n^rounds = {n}^{rounds} overschrijdt {MAX_BRANCHES}: verklein n of rounds"
        )
    state = initial_mixture(n, rounds)
    catalyst_slots = list(range(n - 1))
    snapshots = []
    for t in range(1, rounds + 1):
        slot = main_slot(n, t)
        state = convex_split_round(state, slot)
        scale = n ** t
        snapshots.append(RoundSnapshot(
            round=t,
            main_distribution=state.distribution(slot),
            catalyst_pair=state.index_pair(catalyst_slots, scale),
            main_pairs=[state.index_pair([main_slot(n, s)], scale) for s in range(1, t + 1)],
            branch_count=len(state.branches),
            term_count=scale,
            mixture=state,
        ))
        logger.debug("CSLA orakel n=%d ronde %d: %d takken", n, t, len(state.branches))
    return snapshots


def simulate_reuse_oracle(config: CslaConfig, rounds: int) -> list[RoundSnapshot]:
    """Brute-force orakel voor de r-ronde uitvoer van de CSLA katalysator."""
    return simulate_labels(config.n, rounds)


def closed_form_coefficients(n: int, rounds: int) -> tuple[Fraction, Fraction]:
    """Exacte gewichten (van rho, van tau) na `rounds` rondes."""
    if rounds == 0:
        return Fraction(1), Fraction(0)
    total = n ** rounds
    tau_part = (n - 1) ** rounds
    return Fraction(total - tau_part, total), Fraction(tau_part, total)


def closed_form_output(config: CslaConfig, rounds: int) -> DensityMatrix:
    """rho^{CS,r} op het hoofdslot van ronde r; rounds = 0 geeft rho terug."""
    if rounds < 0:
        raise ValueError(f"rounds = {rounds} moet >= 0 zijn")
    if rounds == 0:
        return config.rho
    w_rho, w_tau = closed_form_coefficients(config.n, rounds)
    return mix([w_rho, w_tau], [config.rho, config.tau])


def fidelity_gain(thr: ThresholdConfig, n: int, rounds: int) -> float:
    """Delta F = ((n-1)/n)^r * (F(tau) - F(rho)), geëvalueerd in log-ruimte."""
    if n < 2:
        raise ValueError(f"n = {n} moet >= 2 zijn")
    if rounds < 0:
        raise ValueError(f"rounds = {rounds} moet >= 0 zijn")
    if rounds == 0:
        return 0.0
    return thr.gap * math.exp(rounds * math.log1p(-1.0 / n))


def catalyst_index_pair(n: int, rounds: int) -> IndexPair:
    """lambda(tau^{CS,t}_C) = (n-1) * [n^t - (n-1)^t, (n-1)^t]."""
    if n < 2 or rounds < 1:
        raise ValueError("n >= 2 en rounds >= 1 vereist")
    return (n - 1) * IndexPair(n ** rounds - (n - 1) ** rounds, (n - 1) ** rounds)


def exceeds_threshold(gap: Fraction, threshold: Fraction, n: int, rounds: int, tol: float) -> bool:
    """Strikte test ((n-1)/n)^r * gap > threshold."""
    margin = rounds * math.log1p(-1.0 / n) + math.log(gap) - math.log(threshold)
    if margin > LOG_MARGIN:
        return True
    if margin < -LOG_MARGIN:
        return False
    if rounds <= EXACT_ROUNDS_LIMIT:
        return (n - 1) ** rounds * gap > threshold * n ** rounds
    return float(gap) * math.exp(rounds * math.log1p(-1.0 / n)) - float(threshold) > tol


def reuse_bound(thr: ThresholdConfig, n: int, threshold: Optional[Fraction] = None) -> ReuseBound:
    """r_CS volgens de floor-formule plus de bewaakte waarde.

    Zonder threshold wordt epsilon gebruikt (distillatie); teleportatie
    geeft de effectieve drempel (d+1)*epsilon/d mee.
    """
    if n < 2:
        raise ValueError(f"n = {n} moet >= 2 zijn")
    if thr.f_tau <= thr.f_rho:
        raise NoCatalyticGainError(
            f"F(tau) = {thr.f_tau} <= F(rho) = {thr.f_rho}: de katalysator helpt nooit"
        )
    threshold = thr.exact_epsilon() if threshold is None else Fraction(threshold)
    gap = thr.exact_gap()
    ratio = math.log(float(threshold / gap)) / math.log((n - 1) / n)
    nearest = round(ratio)
    if abs(ratio - nearest) < LOG_MARGIN:
        ratio = float(nearest)
    raw = math.floor(ratio)
    if gap <= threshold:
        return ReuseBound(raw=raw, guarded=0, ratio=ratio, threshold=threshold)

    guarded = max(raw, 0)
    while guarded > 0 and not exceeds_threshold(gap, threshold, n, guarded, thr.boundary_tol):
        guarded -= 1
    while exceeds_threshold(gap, threshold, n, guarded + 1, thr.boundary_tol):
        guarded += 1
    if guarded != raw:
        logger.info("r_CS grensgeval: formule %d, strikte ongelijkheid %d", raw, guarded)
    return ReuseBound(raw=raw, guarded=guarded, ratio=ratio, threshold=threshold)


def max_reuse_rounds_distill(thr: ThresholdConfig, n: int) -> int:
    """Grootste r waarvoor elke ronde Delta F > epsilon haalt."""
    return reuse_bound(thr, n).guarded


def realize_mixture(mix_state: LabeledMixture, rho: DensityMatrix, tau: DensityMatrix) -> DensityMatrix:
    """Dichte matrix som_b w_b (x)_slot (rho of tau), slot 1 als eerste factor."""
    if rho.dim != tau.dim:
        raise DimensionError("rho en tau moeten dezelfde dimensie hebben")
    total_dim = rho.dim ** mix_state.n_slots
    if total_dim > MAX_REALIZED_DIM:
        raise DimensionError(f"dimensie {total_dim} overschrijdt {MAX_REALIZED_DIM}")
    lookup = {RHO: rho, TAU: tau}
    entries = np.zeros((total_dim, total_dim), dtype=np.complex128)
    for labels, weight in sorted(mix_state.branches.items()):
        entries += float(weight) * tensor(lookup[lab] for lab in labels).entries
    return DensityMatrix(total_dim, entries)


def realized_main_output(config: CslaConfig, rounds: int) -> DensityMatrix:
    """Dichte controle: volledige realisatie, gereduceerd tot het hoofdslot."""
    snapshot = simulate_reuse_oracle(config, rounds)[-1]
    state = realize_mixture(snapshot.mixture, config.rho, config.tau)
    dims = [config.rho.dim] * snapshot.mixture.n_slots
    return partial_trace(state, dims, [main_slot(config.n, rounds)])


def catalyst_drift(config: CslaConfig, rounds: int) -> tuple[float, float]:
    """(Uhlmann fidelity, trace distance) van de katalysator t.o.v. tau^{(x)(n-1)}."""
    fresh = tensor([config.tau] * (config.n - 1))
    if rounds == 0:
        return 1.0, 0.0
    snapshot = simulate_reuse_oracle(config, rounds)[-1]
    catalyst = snapshot.mixture.marginal(range(config.n - 1))
    used = realize_mixture(catalyst, config.rho, config.tau)
    return uhlmann_fidelity(used, fresh), trace_distance(used, fresh)


def output_fidelity(config: CslaConfig, rounds: int) -> float:
    """F(rho^{CS,r}) via de dichte gesloten vorm."""
    return entanglement_fidelity(closed_form_output(config, rounds), config.d)
