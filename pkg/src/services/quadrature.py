import logging
from typing import Callable

from mpmath import mp, mpf

from src.conf.config import settings
from src.schemas import SeriesValue
from src.services.errors import ConvergenceError
from src.services.qseries import check_tolerance, rounding

logger = logging.getLogger(__name__)


def _node(f: Callable, theta):
    result = f(theta)
    if isinstance(result, SeriesValue):
        return result.value, result.err
    return result, mpf(0)


def _level_sum(f: Callable, nodes: int, start: int, step: int, symmetric: bool):
    """
    Sums f over theta_j = 2*pi*j/nodes for j = start, start+step, ... below
    ``nodes``; with ``symmetric`` only j <= nodes/2 is evaluated and mirrored.
    """
    total = mpf(0)
    worst = mpf(0)
    for j in range(start, nodes, step):
        if symmetric and 2 * j > nodes:
            break
        value, err = _node(f, 2 * mp.pi * j / nodes)
        weight = 1 if not symmetric or j == 0 or 2 * j == nodes else 2
        total += weight * value
        worst = max(worst, err)
    return total, worst


def periodic_trapezoid(f: Callable, tol=None, symmetric: bool = False) -> SeriesValue:
    """
    Mean value (1/2pi) int_0^{2pi} f(theta) dtheta of a smooth periodic
    integrand by the trapezoid rule, doubling the grid until two successive
    levels differ by at most ``tol``.

    :param f: Integrand, returning a number or a SeriesValue with a node error.
    :type f: Callable
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :param symmetric: Whether f(theta) = f(2pi - theta), halving the work.
    :type symmetric: bool
    :return: The mean value; err is the last level difference plus the worst node error.
    :rtype: SeriesValue
    """
    tol = check_tolerance(tol)
    nodes = settings.quad_min_nodes
    total, node_err = _level_sum(f, nodes, 0, 1, symmetric)
    previous = total / nodes
    while True:
        added, err = _level_sum(f, 2 * nodes, 1, 2, symmetric)
        node_err = max(node_err, err)
        total += added
        nodes *= 2
        current = total / nodes
        diff = abs(current - previous)
        if diff <= tol:
            break
        if nodes >= settings.quad_max_nodes:
            raise ConvergenceError(
                f"trapezoid rule still moves by {mp.nstr(diff, 5)} at {nodes} nodes"
            )
        previous = current
    logger.debug("trapezoid converged with %d nodes", nodes)
    return SeriesValue(value=current, err=diff + node_err + rounding(nodes, abs(current) + node_err))
