import logging

from src.repository import results
from src.schemas import RunConfig
from src.services.errors import PrecisionExhausted
from src.services.sweep import figure1_sweep, parse_q_grid

logger = logging.getLogger(__name__)


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "figure1",
        parents=[parent],
        help="percentage error 100 (s - l)/s of the lower bound over a q grid",
    )
    parser.set_defaults(handler=cmd_figure1)


def cmd_figure1(config: RunConfig) -> int:
    """
    Emits one row per grid point. Rows that fail carry their error message;
    the command succeeds as long as one row does.

    :param config: The validated run configuration.
    :type config: RunConfig
    :return: Exit status.
    :rtype: int
    """
    grid = parse_q_grid(config.q_grid)
    rows = figure1_sweep(grid, config.n_max, config.tol_value(), keep_sequences=config.verbose)
    records = results.sweep_records(rows, verbose=config.verbose)
    digits = results.digits_for(config.prec_bits)
    results.emit(results.render(records, results.SWEEP_COLUMNS, config.output, digits), config.out_path)
    if all(row.error is not None for row in rows):
        raise PrecisionExhausted(f"every one of the {len(rows)} grid points failed")
    return 0
