"""Command-line interface voor catlab.

    python -m src.main sweep --preset fig-csla-distill --out csla.csv
    python -m src.main verify all
    python -m src.main bounds --protocol csla --task teleport --n 4 --epsilon 0.05 --f-rho 0.6 --f-tau 0.8
    python -m src.main preset list

Exitcodes: 0 gelukt, 1 verificatie gefaald, 2 ongeldige invoer.
"""
import argparse
import logging
import sys
from typing import Optional

from .config import PRESETS, build_sweep_spec, configure_logging, resolve_jobs
from .errors import CatlabError
from .experiments import engine
from .models import ThresholdConfig
from .report import format_table
from .verification import SCOPES, all_passed, render_report, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

# Vlaggen die als sweep-configuratie worden doorgegeven
SWEEP_FLAGS = ("protocol", "task", "d", "n", "m", "rounds", "epsilon", "f_rho", "f_tau",
               "seed", "out", "mc_samples")


def _add_sweep_flags(parser: argparse.ArgumentParser, run_flags: bool = True) -> None:
    """Rooster-vlaggen; run_flags voegt de vlaggen toe die alleen een sweep leest."""
    parser.add_argument("--preset", choices=sorted(PRESETS), help="figuur-preset als basis")
    parser.add_argument("--config", help="configbestand met sleutel=waarde regels")
    parser.add_argument("--protocol", choices=["csla", "esa"])
    parser.add_argument("--task", choices=["distill", "teleport"])
    parser.add_argument("--d", help="lokale dimensie(s), bv. 2 of 2:5")
    parser.add_argument("--n", help="kopieparameter(s) n, bv. 2:50")
    parser.add_argument("--m", help="Schmidt rang(en) M, bv. 1000")
    parser.add_argument("--epsilon", help="drempel(s), bv. 0.05 of 0.01,0.05")
    parser.add_argument("--f-rho", dest="f_rho", help="F(rho) waarde(n)")
    parser.add_argument("--f-tau", dest="f_tau", type=float, help="F(tau) voor CSLA")
    if not run_flags:
        return
    parser.add_argument("--rounds", help="rondes, bv. 1:20")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--mc-samples", dest="mc_samples", type=int,
                        help="Monte Carlo samples per rij (teleport, d = 2)")
    parser.add_argument("--out", help="CSV uitvoerbestand (standaard: stdout)")
    parser.add_argument("--jobs", type=int, help="aantal workers (standaard: CATLAB_JOBS of #cpu)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catlab", description="Herbruikbaarheid van katalysatoren")
    parser.add_argument("--log-level", dest="log_level", help="logniveau (standaard: CATLAB_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    sweep = commands.add_parser("sweep", help="parameter-sweep naar CSV")
    _add_sweep_flags(sweep)

    verify = commands.add_parser("verify", help="gesloten vormen tegen orakels")
    verify.add_argument("scope", nargs="?", default="all", choices=[*SCOPES, "all"])

    bounds = commands.add_parser("bounds", help="r_max met evaluatiespoor")
    _add_sweep_flags(bounds, run_flags=False)

    preset = commands.add_parser("preset", help="presets bekijken")
    preset.add_argument("action", choices=["list"])
    return parser


def _sweep_spec(args: argparse.Namespace):
    flags = {name: getattr(args, name, None) for name in SWEEP_FLAGS}
    return build_sweep_spec(preset=args.preset, config_path=args.config, flags=flags)


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = _sweep_spec(args)
    result = engine.run_sweep(spec, jobs=resolve_jobs(args.jobs))
    if spec.out:
        engine.write_csv(result, spec.out)
        print(result.summary_table())
    else:
        sys.stdout.write(result.csv_text())
        print(result.summary_table(), file=sys.stderr)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_verification(args.scope)
    print(render_report(results))
    return EXIT_OK if all_passed(results) else EXIT_VERIFY_FAILED


def cmd_bounds(args: argparse.Namespace) -> int:
    spec = _sweep_spec(args)
    thr = ThresholdConfig(epsilon=spec.epsilons[0], f_rho=spec.f_rho_values[0], f_tau=spec.f_tau)
    size = spec.n_values[0] if spec.protocol == "csla" else spec.m_values[0]
    report = engine.bounds(spec.protocol, spec.task, thr, size, spec.d_values[0])
    print(report.render())
    return EXIT_OK


def cmd_preset(args: argparse.Namespace) -> int:
    rows = [[name, values["protocol"], values["task"], values["description"]]
            for name, values in PRESETS.items()]
    print(format_table(["preset", "protocol", "taak", "omschrijving"], rows))
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "preset": cmd_preset,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.log_level)
        return COMMANDS[args.command](args)
    except CatlabError as exc:
        print(f"fout: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        logger.debug("ongeldige invoer", exc_info=True)
        print(f"fout: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
