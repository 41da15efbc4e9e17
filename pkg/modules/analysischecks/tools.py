import json

from evodg.registry import register
from .functions import CheckConfig, run_suite


@register(
    name="verify",
    description="Run the inequality and interpolation checks and print a PASS/FAIL report as JSON.",
)
def decorated_verify(config) -> int:
    config.validate()
    report = run_suite(CheckConfig(trials=config.trials, seed=config.seed))
    report = {"status": "PASS" if report["passed"] else "FAIL", **report}
    text = json.dumps(report, indent=2)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if report["passed"] else 1
