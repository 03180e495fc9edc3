import argparse
import logging
import sys
from typing import Optional

from mpmath import mp
from pydantic import ValidationError

from src.conf.config import settings
from src.routes import figure1, lambda_, rho0, verify
from src.schemas import RunConfig
from src.services.errors import HankelIndetError

logger = logging.getLogger("hankel_indet")

ROUTES = (lambda_, rho0, figure1, verify)
NOT_CONFIG = ("command", "handler", "log_level")


def build_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--family", help="moment problem or input kind")
    parent.add_argument("--q", help="base q in (0, 1)")
    parent.add_argument("--a", help="Al-Salam-Carlitz parameter, q < a < 1/q")
    parent.add_argument("--k-weight", dest="k_weight", help="alternative to --q: q = exp(-1/(2k^2))")
    parent.add_argument("--N-max", dest="n_max", type=int, help=f"largest order (default {settings.n_max})")
    parent.add_argument("--prec-bits", dest="prec_bits", type=int, help=f"working precision (default {settings.prec_bits})")
    parent.add_argument("--tol", help=f"absolute tolerance (default {settings.tol})")
    parent.add_argument("--q-grid", dest="q_grid", help=f"start:step:stop or a list (default {settings.q_grid})")
    parent.add_argument("--path", help="moment or Jacobi coefficient file")
    parent.add_argument("--output", help="csv or json")
    parent.add_argument("--out", dest="out_path", help="write to a file instead of stdout")
    parent.add_argument("--suite", help="comma separated verify suites")
    parent.add_argument("--verbose", action="store_true", default=None, help="per-N enclosures in JSON output")
    parent.add_argument("--log-level", dest="log_level", default=settings.log_level)

    parser = argparse.ArgumentParser(
        prog="hankel-indet",
        description="Smallest eigenvalues of Hankel matrices of indeterminate moment problems.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for route in ROUTES:
        route.register(subparsers, parent)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """
    Command line entry point.

    :param argv: Arguments without the program name, default ``sys.argv[1:]``.
    :type argv: list[str] | None
    :return: Exit status: 0 success, 1 verification failure, 2 configuration
        error, 3 precision exhausted, 4 bad input matrix.
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")

    fields = {key: value for key, value in vars(args).items() if key not in NOT_CONFIG and value is not None}
    try:
        config = RunConfig(**fields)
    except ValidationError as err:
        print(f"invalid configuration: {err}", file=sys.stderr)
        return 2

    try:
        with mp.workprec(config.prec_bits):
            return args.handler(config)
    except HankelIndetError as err:
        logger.debug("%s exits with %d", type(err).__name__, err.exit_code)
        print(f"{type(err).__name__}: {err.detail}", file=sys.stderr)
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
