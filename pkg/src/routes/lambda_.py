import logging

from mpmath import mp

from src.repository import results
from src.schemas import RunConfig
from src.services import moments
from src.services.errors import ConfigError
from src.services.moments import MomentSource
from src.services.sweep import classify, extrapolate, lambda_sequence

logger = logging.getLogger(__name__)

LAMBDA_FAMILIES = ("stieltjes-wigert", "file", "jacobi")


def source_for(config: RunConfig) -> MomentSource:
    """
    Builds the moment source a configuration asks for.

    :param config: The validated run configuration.
    :type config: RunConfig
    :return: The moment source.
    :rtype: MomentSource
    """
    if config.family == "stieltjes-wigert":
        return moments.stieltjes_wigert(config.q_param())
    if config.family == "file":
        return moments.moments_from_file(config.path)
    if config.family == "jacobi":
        return moments.jacobi_file_source(config.path)
    raise ConfigError(f"lambda needs --family in {', '.join(LAMBDA_FAMILIES)}, got {config.family}")


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "lambda",
        parents=[parent],
        help="smallest eigenvalue of H_N for N = 0..N_max",
    )
    parser.set_defaults(handler=cmd_lambda)


def cmd_lambda(config: RunConfig) -> int:
    """
    Prints the lambda_N enclosures and, from four orders on, the
    extrapolated limit and the determinacy reading of the sequence.

    :param config: The validated run configuration.
    :type config: RunConfig
    :return: Exit status.
    :rtype: int
    """
    src = source_for(config)
    tol = config.tol_value()
    seq = lambda_sequence(src, config.n_max, tol)
    limit = extrapolate(seq) if len(seq.entries) >= 4 else None
    verdict = classify(seq)
    digits = results.digits_for(config.prec_bits)
    records = results.sequence_records(seq)

    if config.output == "json":
        document = {
            "family": config.family,
            "q": src.q.q if src.q is not None else None,
            "sequence": records,
            "extrapolation": limit.model_dump() if limit is not None else None,
            "probe": verdict.model_dump(),
        }
        text = results.render_document(document, digits)
    else:
        text = results.render(records, results.LAMBDA_COLUMNS, "csv", digits)
        if limit is not None:
            text += f"# s={mp.nstr(limit.s, digits)}, err={mp.nstr(limit.err, 5)}, method={limit.method}\n"
        text += f"# probe={verdict.verdict}\n"
    results.emit(text, config.out_path)
    return 0
