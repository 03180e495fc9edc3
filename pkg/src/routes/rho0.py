import logging

from src.repository import results
from src.schemas import ASCParam, RhoValue, RunConfig
from src.services import rho
from src.services.errors import ConfigError

logger = logging.getLogger(__name__)

RHO_FAMILIES = ("stieltjes-wigert", "al-salam-carlitz", "freud-quartic", "q-inverse-hermite")


def _record(value: RhoValue, K0=None) -> dict:
    return {
        "family": value.family,
        "route": value.route,
        "value": value.value,
        "err": value.err,
        "l": rho.lower_bound(value),
        "K0": K0,
    }


def routes_for(config: RunConfig) -> tuple[list[RhoValue], dict]:
    """
    Evaluates rho_0 of the configured family by both of its routes.

    :param config: The validated run configuration.
    :type config: RunConfig
    :return: The route values and extra constants to report.
    :rtype: tuple[list[RhoValue], dict]
    """
    tol = config.tol_value()
    if config.family == "stieltjes-wigert":
        q = config.q_param()
        values = [rho.rho0_sw_fast(q, tol), rho.rho0_sw_direct(q, tol)]
    elif config.family == "al-salam-carlitz":
        try:
            p = ASCParam(q=config.q_param(), a=config.a)
        except ValueError as err:
            raise ConfigError(f"invalid Al-Salam-Carlitz parameters: {err}")
        values = [rho.rho0_asc(p, tol), rho.rho0_asc_quadrature(p, tol)]
    elif config.family == "freud-quartic":
        values = [rho.rho0_freud(tol), rho.rho0_freud_quadrature(tol)]
        return values, {"K0": rho.freud_constants().K0}
    elif config.family == "q-inverse-hermite":
        values = list(rho.rho0_qhermite(config.q_param(), tol))
    else:
        raise ConfigError(f"rho0 needs --family in {', '.join(RHO_FAMILIES)}, got {config.family}")
    return values, {}


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "rho0",
        parents=[parent],
        help="rho_0 and the lower bound l = 1/rho_0 for a family",
    )
    parser.set_defaults(handler=cmd_rho0)


def cmd_rho0(config: RunConfig) -> int:
    values, constants = routes_for(config)
    rho.compare_routes(values[0], values[1])
    records = [_record(value, constants.get("K0")) for value in values]
    digits = results.digits_for(config.prec_bits)
    results.emit(results.render(records, results.RHO_COLUMNS, config.output, digits), config.out_path)
    return 0
