import argparse
import importlib
import logging
import os
import pkgutil
import sys

from evodg.registry import get_registry
from evodg.runner import Runner
from utils.config import build_config

logger = logging.getLogger("evodg")


def load_tool_modules(module_dir="modules"):
    """
    Dynamically finds and imports all 'tools.py' files within subdirectories
    of the module directory, which registers the commands and problems.
    """
    logger.debug("Loading tool modules from '%s'", module_dir)
    search_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), module_dir)
    for (_, module_name, _) in pkgutil.iter_modules([search_path]):
        full_module_path = f"{module_dir}.{module_name}"
        try:
            importlib.import_module(".tools", package=full_module_path)
            logger.debug("Loaded tools from '%s'", full_module_path)
        except ModuleNotFoundError as e:
            if e.name != f"{full_module_path}.tools":
                logger.error("Failed to load tools from '%s': %s", full_module_path, e)
            else:
                logger.debug("No tools.py found in '%s', skipping.", full_module_path)
        except Exception as e:
            logger.error("Failed to load tools from '%s': %s", full_module_path, e)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evodg",
        description="Space-time DG solver for evolutionary equations with exponentially weighted Gauss-Radau quadrature.",
    )
    parser.add_argument("command", help="solve, convergence, quadrature or verify")
    parser.add_argument("--problem", help="registered problem name (prob1, prob2, smooth)")
    parser.add_argument("--p", type=int, help="spatial polynomial degree")
    parser.add_argument("--q", type=int, help="temporal polynomial degree")
    parser.add_argument("--N", type=int, help="number of spatial cells")
    parser.add_argument("--M", type=int, help="number of time slabs (defaults to N)")
    parser.add_argument("--rho", type=float, help="exponential weight")
    parser.add_argument("--T", type=float, help="time horizon")
    parser.add_argument("--sweep", help="comma-separated N = M levels for convergence (M levels when --N is given)")
    parser.add_argument("--jobs", type=int, help="worker processes for sweeps")
    parser.add_argument("--out", help="output file")
    parser.add_argument("--config", help="JSON file with flag values")
    parser.add_argument("--seed", type=int, help="random seed for verify")
    parser.add_argument("--a", type=float, help="decay parameter for quadrature")
    parser.add_argument("--rate-matrix", action="store_true", default=None, help="(p, q) grid of E-rates")
    parser.add_argument("--degrees", type=int, help="largest p and q of the rate matrix")
    parser.add_argument("--trials", type=int, help="random trials per inequality check")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return parser


def configure_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="[%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        config = build_config(flags, args.config)
    except Exception as e:
        print(f"An error occurred: {e}", file=sys.stderr)
        return 2

    configure_logging(config.log_level)
    load_tool_modules()
    logger.debug("Registered commands: %s", ", ".join(sorted(get_registry("command"))))

    result = Runner().run(args.command, config)
    if "error" in result:
        print(f"An error occurred: {result['error']}", file=sys.stderr)
    return result["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
