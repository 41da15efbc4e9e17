from evodg.registry import register
from .functions import manufactured_smooth, problem1, problem2


@register(
    name="prob1",
    description="Changing-type problem on (-pi/2, pi/2): hyperbolic left, parabolic right, smooth data.",
    group="problem",
)
def decorated_problem1():
    return problem1()


@register(
    name="prob2",
    description="Changing-type problem on (-3pi/2, 3pi/2) with right-hand sides only in L2.",
    group="problem",
)
def decorated_problem2():
    return problem2()


@register(
    name="smooth",
    description="Hyperbolic problem on (0, 1) with u = (e^t - 1) sin(pi x), for temporal order studies.",
    group="problem",
)
def decorated_smooth():
    return manufactured_smooth()
