"""
Punto de entrada de ruinlab

ruinlab <beta|ruin|yinf|tail|validate> --config <json> --out <dir> [opciones]
ruinlab scenarios list [--out <dir>]
ruinlab scenarios run <nombre> --out <dir> [opciones]
ruinlab runs --out <dir> [--only <comando>]

stdout lleva una sola línea de resumen; los logs y el detalle de errores van
a stderr.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from .commands import RunOptions
from .commands import beta, ruin, tail, validate, yinf
from .commands import runs as runs_cmd
from .commands import scenarios as scenarios_cmd
from .config import LOG_LEVEL
from .errors import RuinLabError
from .reports import json_safe
from .schemas import load_config

logger = logging.getLogger("ruinlab")

COMMANDS = {
    "beta": beta.run,
    "ruin": ruin.run,
    "yinf": yinf.run,
    "tail": tail.run,
    "validate": validate.run,
}

EXIT_UNEXPECTED = 1


def _common(parser: argparse.ArgumentParser, out_required: bool = True) -> None:
    parser.add_argument("--out", required=out_required, help="Directorio de salida")
    parser.add_argument("--seed", type=int, default=None, help="Semilla maestra (anula run.seed)")
    parser.add_argument("--threads", type=int, default=None, help="Hilos de trabajo (anula run.threads)")
    parser.add_argument("--no-timestamp", action="store_true", help="Salidas sin fecha, idénticas byte a byte")
    parser.add_argument("--no-ledger", action="store_true", help="No registrar la corrida en SQLite")
    _verbosity(parser)


def _verbosity(parser: argparse.ArgumentParser) -> None:
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Logs de depuración")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Solo advertencias y errores")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ruinlab",
        description="Probabilidad de ruina con inversiones arriesgadas: β, Monte Carlo y cotas de Y∞",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"Ejecutar {name}")
        cmd.add_argument("--config", required=True, help="Experimento en JSON")
        _common(cmd)
        if name == "tail":
            cmd.add_argument("--input", default=None, help="ruin.csv con Ψ̂ por u")
            cmd.add_argument("--samples", default=None, help="yinf_samples.csv para el estimador de Hill")

    scen = sub.add_parser("scenarios", help="Catálogo de escenarios")
    scen_sub = scen.add_subparsers(dest="action", required=True)
    listing = scen_sub.add_parser("list", help="Listar el catálogo")
    _common(listing, out_required=False)
    running = scen_sub.add_parser("run", help="Ejecutar un escenario")
    running.add_argument("name", help="Nombre del escenario")
    _common(running)

    runs = sub.add_parser("runs", help="Listar las corridas registradas en un directorio de salida")
    runs.add_argument("--out", required=True, help="Directorio de salida con ruinlab.db")
    runs.add_argument("--only", default=None, help="Filtrar por comando")
    _verbosity(runs)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = getattr(logging, LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format="[%(levelname)s] %(name)s: %(message)s", stream=sys.stderr, force=True)


def _options(args: argparse.Namespace) -> RunOptions:
    return RunOptions(
        out=args.out,
        seed=args.seed,
        threads=args.threads,
        timestamp=not args.no_timestamp,
        ledger=not args.no_ledger,
        input=getattr(args, "input", None),
        samples=getattr(args, "samples", None),
    )


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "runs":
        for row in runs_cmd.list_ledger(args.out, args.only):
            print(runs_cmd.format_run(row))
        return 0
    if args.command == "scenarios":
        if args.action == "list":
            options = _options(args) if args.out else None
            for row in scenarios_cmd.list_catalog(options):
                print(f"{row['name']:<28} {row['tag'] or '-':<7} {'aprox.' if row['approximate'] else '':<7} {row['description']}")
            return 0
        result = scenarios_cmd.run_scenario(args.name, _options(args))
    else:
        config = load_config(args.config)
        result = COMMANDS[args.command](config, _options(args))
    print(result.line)
    return result.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return dispatch(args)
    except RuinLabError as exc:
        print(f"[ERROR] {args.command}: {exc.message}")
        print(json.dumps(json_safe(exc.detail), ensure_ascii=False, sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"[ERROR] {args.command}: {exc}")
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, ensure_ascii=False), file=sys.stderr)
        return 2
    except Exception as exc:
        logger.exception("Error inesperado: %s", exc)
        print(f"[ERROR] {args.command}: error inesperado ({type(exc).__name__})")
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
