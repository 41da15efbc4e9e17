import logging
from difflib import get_close_matches

from evodg.exceptions import ConfigError, NumericalError
from evodg.registry import get_registry

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class Runner:
    def __init__(self):
        self.commands = get_registry("command")

    def run(self, command: str, config) -> dict:
        resolved_name = self._resolve_command_name(command)
        if not resolved_name:
            return {"error": f"Unknown command: '{command}'.", "exit_code": EXIT_CONFIG}
        if resolved_name != command:
            logger.info("Interpreting '%s' as '%s'", command, resolved_name)

        func = self.commands[resolved_name]["func"]
        try:
            exit_code = func(config)
        except ConfigError as e:
            return {"error": f"Invalid configuration for {resolved_name}: {e}", "exit_code": EXIT_CONFIG}
        except NumericalError as e:
            return {"error": f"Numerical failure in {resolved_name}: {e}", "exit_code": EXIT_NUMERICAL}
        except ValueError as e:
            return {"error": f"Invalid input for {resolved_name}: {e}", "exit_code": EXIT_CONFIG}
        except Exception as e:
            logger.exception("Unexpected failure in %s", resolved_name)
            return {"error": f"Error executing {resolved_name}: {e}", "exit_code": EXIT_FAILED}
        return {"command": resolved_name, "exit_code": int(exit_code or EXIT_OK)}

    def _resolve_command_name(self, command: str):
        if command in self.commands:
            return command
        matches = get_close_matches(command, self.commands.keys(), n=1, cutoff=0.7)
        return matches[0] if matches else None
