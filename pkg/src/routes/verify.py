import logging

from src.repository import results
from src.schemas import RunConfig
from src.services.errors import VerificationFailed
from src.services.verify import run_suites

logger = logging.getLogger(__name__)


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "verify",
        parents=[parent],
        help="run the property suites and print a pass/fail matrix",
    )
    parser.set_defaults(handler=cmd_verify)


def cmd_verify(config: RunConfig) -> int:
    """
    Runs the suites named by ``--suite`` (comma separated, default all) at
    ``--q`` (default 0.5).

    :param config: The validated run configuration.
    :type config: RunConfig
    :return: Exit status.
    :rtype: int
    """
    names = [name.strip() for name in config.suite.split(",") if name.strip()] if config.suite else None
    q = config.q_param() if config.q is not None or config.k_weight is not None else None
    outcome = run_suites(names, q, config.tol_value())
    records = [result.model_dump() for result in outcome]
    results.emit(results.render(records, results.SUITE_COLUMNS, config.output, 15), config.out_path)
    failed = [result.suite for result in outcome if not result.passed]
    if failed:
        details = "; ".join(f"{result.suite}: {result.detail}" for result in outcome if not result.passed)
        raise VerificationFailed(f"{len(failed)} suite(s) failed: {details}")
    return 0
