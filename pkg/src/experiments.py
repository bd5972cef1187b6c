"""Parameter-sweeps voor de figuurdata en de r_max berekening met spoor.

Eén reeks is een rooster-punt zonder r (protocol, taak, d, n of M,
F(rho), epsilon); een reeks wordt in één keer over alle rondes uitgerekend
zodat de gesloten vormen en de r_max per reeks maar één keer nodig zijn.
Reeksen zijn onafhankelijk en gaan bij jobs > 1 naar een procespool; de
uitvoer blijft in roostervolgorde.
"""
import csv
import io
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, TextIO

from . import csla, esa, teleportation
from .errors import ConfigError
from .models import EmbezzlingSpec, SweepSpec, ThresholdConfig
from .quantum_core import isotropic_state
from .report import format_table, format_value

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "protocol", "task", "d", "n", "M", "f_rho", "f_tau", "epsilon", "r",
    "ent_fidelity", "fidelity", "gain", "exceeds", "r_max", "r_max_raw", "mc_fidelity",
]

# Extra rondes voorbij r_max in het spoor van `bounds`
TRACE_MARGIN = 2


@dataclass(frozen=True)
class SeriesKey:
    protocol: str
    task: str
    d: int
    n: Optional[int]
    M: Optional[int]
    f_rho: float
    f_tau: float
    epsilon: float

    def threshold_config(self) -> ThresholdConfig:
        return ThresholdConfig(epsilon=self.epsilon, f_rho=self.f_rho, f_tau=self.f_tau)

    def label(self) -> str:
        size = f"n={self.n}" if self.protocol == "csla" else f"M={self.M}"
        return f"{self.protocol}/{self.task} d={self.d} {size} F(rho)={self.f_rho} eps={self.epsilon}"


@dataclass
class SeriesSummary:
    key: SeriesKey
    min_gain: float
    max_gain: float
    first_violation: Optional[int]  # Eerste ronde zonder winst boven de drempel
    r_max: int


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[dict] = field(default_factory=list)
    summaries: list[SeriesSummary] = field(default_factory=list)

    def to_csv(self, stream: TextIO) -> None:
        writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: format_value(row.get(k)) for k in CSV_COLUMNS})

    def csv_text(self) -> str:
        buffer = io.StringIO(newline="")
        self.to_csv(buffer)
        return buffer.getvalue()

    def summary_table(self) -> str:
        rows = [
            [s.key.label(), s.min_gain, s.max_gain, s.first_violation, s.r_max]
            for s in self.summaries
        ]
        return format_table(
            ["reeks", "min winst", "max winst", "eerste schending", "r_max"],
            rows, title=f"Sweep {self.spec.protocol}/{self.spec.task}",
        )


@dataclass
class BoundsReport:
    """r_max met het evaluatiespoor per ronde."""
    protocol: str
    task: str
    raw: Optional[int]  # Alleen CSLA heeft een gesloten floor-formule
    guarded: int
    threshold: float
    trace: list[tuple[int, float, bool]]

    @property
    def differs(self) -> bool:
        return self.raw is not None and self.raw != self.guarded

    def render(self) -> str:
        table = format_table(["r", "winst", "> drempel"], [list(step) for step in self.trace],
                             title=f"r_max {self.protocol}/{self.task} (drempel {self.threshold:.12g})")
        lines = [table, ""]
        if self.raw is not None:
            lines.append(f"formule (floor): {self.raw}")
        lines.append(f"bewaakt:         {self.guarded}")
        if self.differs:
            lines.append("LET OP: formule en strikte ongelijkheid verschillen")
        return "\n".join(lines)


def _mc_column(fidelity: float, d: int, samples: int, seed: int) -> Optional[float]:
    if samples <= 0 or d != 2 or fidelity < 1.0 / d ** 2:
        return None
    resource = isotropic_state(fidelity, d)
    return teleportation.haar_average_teleportation(resource, samples, seed).mean


def _csla_rows(key: SeriesKey, rounds: list[int], seed: int, mc_samples: int) -> list[dict]:
    thr = key.threshold_config()
    # Zonder gat is er geen r_max formule; de reeks krijgt wel rijen
    has_gap = thr.f_tau > thr.f_rho
    threshold, r_max, r_max_raw = None, 0, None
    if not has_gap:
        logger.warning("%s: F(tau) <= F(rho), geen katalytische winst", key.label())
    elif key.task == "distill":
        threshold = thr.exact_epsilon()
        bound = csla.reuse_bound(thr, key.n)
        r_max, r_max_raw = bound.guarded, bound.raw
    else:
        threshold = thr.teleport_threshold(key.d)
        bound = teleportation.teleport_reuse_bound_csla(thr, key.n, key.d)
        r_max, r_max_raw = bound.guarded, bound.raw
    rows = []
    for r in rounds:
        delta = csla.fidelity_gain(thr, key.n, r)
        ent_fidelity = key.f_rho + delta
        passed = has_gap and csla.exceeds_threshold(
            thr.exact_gap(), threshold, key.n, r, thr.boundary_tol
        )
        if key.task == "distill":
            fidelity, gain, mc = ent_fidelity, delta, None
        else:
            outcome = teleportation.catalytic_teleport_fidelity_csla(thr, key.n, r, key.d)
            fidelity = outcome.average_fidelity
            gain = fidelity - teleportation.standard_teleport_fidelity(thr, key.d).average_fidelity
            mc = _mc_column(ent_fidelity, key.d, mc_samples, seed + r)
        rows.append(_row(key, r, ent_fidelity, fidelity, gain, passed, r_max, r_max_raw, mc))
    return rows


def _esa_rows(key: SeriesKey, rounds: list[int], seed: int, mc_samples: int) -> list[dict]:
    thr = key.threshold_config()
    spec = EmbezzlingSpec(d=key.d, M=key.M)
    if key.task == "distill":
        threshold = float(thr.exact_epsilon())
        r_max = esa.max_reuse_rounds_distill(spec, thr)
    else:
        threshold = float(thr.teleport_threshold(key.d))
        r_max = teleportation.max_reuse_rounds_teleport_esa(spec, thr)
    baseline = teleportation.avg_fidelity_from_ent_fidelity(key.f_rho, key.d)
    rows = []
    for r in rounds:
        ent_fidelity = esa.closed_form_fidelity(spec, r)
        passed = ent_fidelity - key.f_rho - threshold > thr.boundary_tol
        if key.task == "distill":
            fidelity, gain, mc = ent_fidelity, ent_fidelity - key.f_rho, None
        else:
            fidelity = teleportation.catalytic_teleport_fidelity_esa(spec, r).average_fidelity
            gain = fidelity - baseline
            mc = _mc_column(ent_fidelity, key.d, mc_samples, seed + r)
        rows.append(_row(key, r, ent_fidelity, fidelity, gain, passed, r_max, None, mc))
    return rows


def _row(key: SeriesKey, r: int, ent_fidelity: float, fidelity: float, gain: float,
         passed: bool, r_max: int, r_max_raw: Optional[int], mc: Optional[float]) -> dict:
    return {
        "protocol": key.protocol, "task": key.task, "d": key.d, "n": key.n, "M": key.M,
        "f_rho": key.f_rho, "f_tau": key.f_tau if key.protocol == "csla" else None,
        "epsilon": key.epsilon, "r": r, "ent_fidelity": ent_fidelity, "fidelity": fidelity,
        "gain": gain, "exceeds": passed, "r_max": r_max, "r_max_raw": r_max_raw,
        "mc_fidelity": mc,
    }


def compute_series(key: SeriesKey, rounds: list[int], seed: int, mc_samples: int) -> list[dict]:
    """Alle rijen van één reeks; module-niveau zodat de procespool hem kan picklen."""
    if key.protocol == "csla":
        return _csla_rows(key, rounds, seed, mc_samples)
    return _esa_rows(key, rounds, seed, mc_samples)


def _summarize(key: SeriesKey, rows: list[dict]) -> SeriesSummary:
    gains = [row["gain"] for row in rows]
    violation = next((row["r"] for row in rows if not row["exceeds"]), None)
    return SeriesSummary(key, min(gains), max(gains), violation, rows[0]["r_max"])


class ExperimentEngine:
    """Voert sweeps uit en berekent r_max met spoor."""

    def series_keys(self, spec: SweepSpec) -> list[SeriesKey]:
        sizes = spec.n_values if spec.protocol == "csla" else spec.m_values
        keys = []
        for d, size, f_rho, epsilon in itertools.product(
            spec.d_values, sizes, spec.f_rho_values, spec.epsilons
        ):
            keys.append(SeriesKey(
                protocol=spec.protocol, task=spec.task, d=d,
                n=size if spec.protocol == "csla" else None,
                M=size if spec.protocol == "esa" else None,
                f_rho=f_rho, f_tau=spec.f_tau, epsilon=epsilon,
            ))
        return keys

    def run_sweep(self, spec: SweepSpec, jobs: int = 1) -> SweepResult:
        keys = self.series_keys(spec)
        rounds = sorted(set(spec.rounds))
        logger.info("sweep %s/%s: %d reeksen x %d rondes, %d jobs",
                    spec.protocol, spec.task, len(keys), len(rounds), jobs)
        args = (keys, [rounds] * len(keys), [spec.seed] * len(keys), [spec.mc_samples] * len(keys))
        if jobs > 1 and len(keys) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                series = list(pool.map(compute_series, *args))
        else:
            series = list(map(compute_series, *args))

        result = SweepResult(spec=spec)
        for key, rows in zip(keys, series):
            result.rows.extend(rows)
            result.summaries.append(_summarize(key, rows))
        return result

    def write_csv(self, result: SweepResult, path: str) -> None:
        try:
            with open(path, "w", newline="", encoding="utf-8") as handle:
                result.to_csv(handle)
        except OSError as exc:
            raise ConfigError(f"kan {path} niet schrijven: {exc}") from exc
        logger.info("%d rijen geschreven naar %s", len(result.rows), path)

    def bounds(self, protocol: str, task: str, thr: ThresholdConfig,
               size: int, d: int = 2) -> BoundsReport:
        """r_max voor één parameterset, met formule, bewaakte waarde en spoor."""
        if protocol == "csla":
            if task == "distill":
                bound = csla.reuse_bound(thr, size)
            else:
                bound = teleportation.teleport_reuse_bound_csla(thr, size, d)
            gap = thr.exact_gap()
            trace = [
                (r, csla.fidelity_gain(thr, size, r),
                 csla.exceeds_threshold(gap, bound.threshold, size, r, thr.boundary_tol))
                for r in range(1, max(bound.guarded, 0) + TRACE_MARGIN + 1)
            ]
            return BoundsReport(protocol, task, bound.raw, bound.guarded, float(bound.threshold), trace)

        spec = EmbezzlingSpec(d=d, M=size)
        threshold = thr.exact_epsilon() if task == "distill" else thr.teleport_threshold(d)
        steps = esa.reuse_scan(spec, thr, float(threshold))
        guarded = esa.max_reuse_rounds_distill(spec, thr, float(threshold))
        trace = [(s.round, s.gain, s.passed) for s in steps]
        return BoundsReport(protocol, task, None, guarded, float(threshold), trace)


engine = ExperimentEngine()
