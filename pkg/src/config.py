"""Configuratie: omgevingsvariabelen, configbestand en figuur-presets.

Voorrang: CLI-vlaggen > configbestand > preset > standaardwaarden van SweepSpec.
Het configbestand is platte tekst met regels `sleutel=waarde`:

    protocol=csla
    task=distill
    n=2:50
    rounds=1:20
    epsilon=0.05
    f_rho=0.6,0.52
    f_tau=0.8

Roosters mogen een lijst zijn (`2,3,5`), een inclusief bereik (`2:50`) of
een bereik met stap (`1:20:2`).
"""
import logging
import os
from typing import Any, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from .errors import ConfigError
from .models import SweepSpec

logger = logging.getLogger(__name__)

ENV_JOBS = "CATLAB_JOBS"
ENV_LOG_LEVEL = "CATLAB_LOG_LEVEL"

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Sleutels in configbestand en CLI -> veld in SweepSpec
GRID_KEYS = {
    "d": "d_values",
    "n": "n_values",
    "m": "m_values",
    "rounds": "rounds",
    "epsilon": "epsilons",
    "f_rho": "f_rho_values",
}
INT_GRIDS = {"d_values", "n_values", "m_values", "rounds"}
SCALAR_KEYS = {"protocol", "task", "f_tau", "seed", "out", "mc_samples"}

POWERS_OF_TWO = [2 ** k for k in range(1, 21)]

PRESETS: dict[str, dict[str, Any]] = {
    "fig-csla-distill": {
        "description": "CSLA distillatie: F(rho^{CS,r}) over n en r",
        "protocol": "csla", "task": "distill",
        "d_values": [2], "n_values": list(range(2, 51)), "rounds": list(range(1, 21)),
        "epsilons": [0.05], "f_rho_values": [0.6, 0.52], "f_tau": 0.8,
    },
    "fig-csla-teleport": {
        "description": "CSLA teleportatie: f_c over n en r",
        "protocol": "csla", "task": "teleport",
        "d_values": [2], "n_values": list(range(2, 51)), "rounds": list(range(1, 21)),
        "epsilons": [0.05], "f_rho_values": [0.6, 0.52], "f_tau": 0.8,
    },
    "fig-csla-bounds": {
        "description": "CSLA r_CS over n en epsilon",
        "protocol": "csla", "task": "distill",
        "d_values": [2], "n_values": list(range(2, 51)), "rounds": [1],
        "epsilons": [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1],
        "f_rho_values": [0.6, 0.52], "f_tau": 0.8,
    },
    "fig-esa-distill": {
        "description": "ESA distillatie: F(rho^{E,r}) bij M = 1000",
        "protocol": "esa", "task": "distill",
        "d_values": [2, 3, 4, 5], "m_values": [1000], "rounds": list(range(1, 16)),
        "epsilons": [0.05], "f_rho_values": [0.7, 0.8],
    },
    "fig-esa-lifetime": {
        "description": "ESA distillatie: r_E over M = 2^1 .. 2^20",
        "protocol": "esa", "task": "distill",
        "d_values": [2], "m_values": POWERS_OF_TWO, "rounds": list(range(1, 22)),
        "epsilons": [0.05], "f_rho_values": [0.7, 0.8],
    },
    "fig-esa-teleport": {
        "description": "ESA teleportatie: r_E over M = 2^1 .. 2^20",
        "protocol": "esa", "task": "teleport",
        "d_values": [2], "m_values": POWERS_OF_TWO, "rounds": list(range(1, 22)),
        "epsilons": [0.05], "f_rho_values": [0.7, 0.8],
    },
}


def configure_logging(level: Optional[str] = None) -> None:
    level = (level or os.getenv(ENV_LOG_LEVEL) or "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"onbekend logniveau {level}")
    logging.basicConfig(level=level, format=LOG_FORMAT)


def resolve_jobs(flag: Optional[int] = None) -> int:
    """Aantal workers: vlag, dan CATLAB_JOBS, dan het aantal cpu's."""
    if flag is not None:
        jobs = flag
    elif os.getenv(ENV_JOBS):
        try:
            jobs = int(os.getenv(ENV_JOBS))
        except ValueError:
            raise ConfigError(f"{ENV_JOBS} = {os.getenv(ENV_JOBS)!r} is geen geheel getal")
    else:
        jobs = os.cpu_count() or 1
    if jobs < 1:
        raise ConfigError(f"aantal jobs moet >= 1 zijn, kreeg {jobs}")
    return jobs


def parse_grid(text: str, integer: bool) -> list:
    """'2,3,5' | '2:50' | '1:20:2' -> lijst waarden."""
    cast = int if integer else float
    text = str(text).strip()
    if not text:
        raise ConfigError("leeg rooster")
    values: list = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ":" not in part:
                values.append(cast(part))
                continue
            if not integer:
                raise ConfigError(f"bereik {part!r} is alleen toegestaan voor gehele roosters")
            pieces = [int(p) for p in part.split(":")]
            if len(pieces) == 2:
                start, stop, step = pieces[0], pieces[1], 1
            elif len(pieces) == 3:
                start, stop, step = pieces
            else:
                raise ConfigError(f"ongeldig bereik {part!r}")
            if step < 1 or stop < start:
                raise ConfigError(f"ongeldig bereik {part!r}")
            values.extend(range(start, stop + 1, step))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"kan rooster {text!r} niet lezen: {exc}") from exc
    return values


def normalize_values(raw: dict[str, Any]) -> dict[str, Any]:
    """Sleutels uit configbestand of CLI omzetten naar SweepSpec-velden."""
    result: dict[str, Any] = {}
    for key, value in raw.items():
        if value is None:
            continue
        key = key.strip().lower().replace("-", "_")
        if key in GRID_KEYS:
            field = GRID_KEYS[key]
            result[field] = value if isinstance(value, list) else parse_grid(value, field in INT_GRIDS)
        elif key in SCALAR_KEYS:
            result[key] = value
        else:
            raise ConfigError(f"onbekende configsleutel {key!r}")
    return result


def load_config_file(path: str) -> dict[str, Any]:
    if not os.path.isfile(path):
        raise ConfigError(f"configbestand {path} bestaat niet")
    values = dotenv_values(path)
    logger.debug("configbestand %s: %s", path, sorted(values))
    return normalize_values(values)


def preset_values(name: Optional[str]) -> dict[str, Any]:
    if name is None:
        return {}
    if name not in PRESETS:
        raise ConfigError(f"onbekende preset {name!r}; kies uit {', '.join(PRESETS)}")
    return {k: v for k, v in PRESETS[name].items() if k != "description"}


def build_sweep_spec(preset: Optional[str] = None,
                     config_path: Optional[str] = None,
                     flags: Optional[dict[str, Any]] = None) -> SweepSpec:
    """Voeg preset, configbestand en vlaggen samen tot een gevalideerde SweepSpec."""
    merged = preset_values(preset)
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update(normalize_values(flags or {}))
    try:
        return SweepSpec(**merged)
    except ValidationError as exc:
        raise ConfigError(f"ongeldige sweep-configuratie: {exc}") from exc
