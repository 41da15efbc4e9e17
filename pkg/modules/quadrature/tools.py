import pandas as pd

from evodg.registry import register
from .functions import radau_rule


@register(
    name="quadrature",
    description="Print the nodes and weights of the right-sided Gauss-Radau rule for exp(-a (x + 1)) as 'node,weight' lines.",
)
def decorated_quadrature(config) -> int:
    config.validate(min_q=0)
    rule = radau_rule(config.a, config.q)
    frame = pd.DataFrame({"node": rule.nodes, "weight": rule.weights})
    text = frame.to_csv(header=False, index=False, float_format="%.17g", lineterminator="\n")
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0
