import logging
from decimal import Decimal, InvalidOperation
from typing import Optional

from mpmath import mp, mpf

from src.schemas import Extrapolation, LambdaEntry, LambdaSequence, Precision, ProbeVerdict, QParam, SweepRow
from src.services.errors import ConfigError, HankelIndetError
from src.services.moments import MomentSource, hankel, stieltjes_wigert
from src.services.rho import lower_bound, rho0_sw_fast
from src.services.spectra import smallest_eig

logger = logging.getLogger(__name__)

PLATEAU_RATIO = mpf("0.9")
DECAY_RATIO = mpf("0.01")


def lambda_sequence(src: MomentSource, N_max: int, tol=None) -> LambdaSequence:
    """
    Encloses lambda_N for N = 0..N_max, raising the precision for each order
    to what the source requires. The enclosure of order N - 1 caps the
    bisection bracket of order N.

    :param src: The moment source.
    :type src: MomentSource
    :param N_max: Largest order.
    :type N_max: int
    :param tol: Enclosure width.
    :type tol: mpf | None
    :return: The sequence of enclosures.
    :rtype: LambdaSequence
    """
    if N_max < 0:
        raise ConfigError("N_max must be nonnegative")
    base = mp.prec
    entries = []
    upper = None
    for N in range(N_max + 1):
        bits = src.working_precision(N, base)
        with Precision(bits=bits).context():
            enclosure = smallest_eig(hankel(src, N), tol, upper=upper)
        upper = enclosure.hi
        entries.append(LambdaEntry(N=N, enclosure=enclosure, prec_bits=bits))
        logger.debug("lambda_%d in [%s, %s] at %d bits", N, mp.nstr(enclosure.lo, 12), mp.nstr(enclosure.hi, 12), bits)
    return LambdaSequence(q=src.q, entries=entries)


def _aitken_level(values: list, noise: mpf) -> tuple[list, bool]:
    level = []
    second = mpf(0)
    for i in range(len(values) - 2):
        second = values[i + 2] - 2 * values[i + 1] + values[i]
        if abs(second) <= noise:
            level.append(values[i + 2])
        else:
            level.append(values[i + 2] - (values[i + 2] - values[i + 1]) ** 2 / second)
    return level, abs(second) > noise


def extrapolate(seq: LambdaSequence, max_levels: int = 3) -> Extrapolation:
    """
    Limit of the midpoint sequence by iterated Aitken delta-squared. When
    the newest second difference is within noise the iteration stops; if
    that happens on the first level the last midpoint is returned with the
    spread of the final three midpoints as its error.

    :param seq: At least four enclosures.
    :type seq: LambdaSequence
    :param max_levels: Most Aitken iterations to apply.
    :type max_levels: int
    :return: The extrapolated limit.
    :rtype: Extrapolation
    """
    values = seq.midpoints()
    if len(values) < 4:
        raise ConfigError(f"extrapolation needs at least 4 orders, got {len(values)}")
    width = max(entry.enclosure.width for entry in seq.entries)
    noise = max(16 * width, mpf(2) ** (8 - mp.prec) * max(abs(v) for v in values))

    levels = [values]
    while len(levels) <= max_levels and len(levels[-1]) >= 3:
        level, stable = _aitken_level(levels[-1], noise)
        if not stable:
            break
        levels.append(level)

    if len(levels) == 1:
        last = values[-3:]
        spread = max(last) - min(last)
        return Extrapolation(s=values[-1], err=spread + width, method="fallback")

    deepest = levels[-1]
    if len(deepest) >= 2:
        change = abs(deepest[-1] - deepest[-2])
    else:
        change = abs(deepest[-1] - levels[-2][-1])
    logger.debug("Aitken extrapolation used %d levels", len(levels) - 1)
    return Extrapolation(s=deepest[-1], err=change + width, method="aitken")


def parse_q_grid(text: str) -> list[QParam]:
    """
    Parses ``start:step:stop`` (inclusive) or a comma separated list of q values.

    :param text: The grid description.
    :type text: str
    :return: The grid.
    :rtype: list[QParam]
    """
    try:
        if ":" in text:
            start, step, stop = (Decimal(part) for part in text.split(":"))
            if step <= 0:
                raise ConfigError(f"q grid step must be positive in {text!r}")
            count = int((stop - start) / step) + 1
            points = [start + i * step for i in range(count)]
        else:
            points = [Decimal(part) for part in text.split(",") if part.strip()]
    except (InvalidOperation, ValueError):
        raise ConfigError(f"cannot parse q grid {text!r}; expected start:step:stop")
    if not points:
        raise ConfigError(f"q grid {text!r} is empty")
    for point in points:
        if not 0 < point < 1:
            raise ConfigError(f"q grid point {point} is outside (0, 1)")
    return [QParam(q=str(point)) for point in points]


def figure1_sweep(q_grid: list[QParam], N_max: int, tol=None, keep_sequences: bool = False) -> list[SweepRow]:
    """
    For each q: lambda_N up to N_max, its extrapolated limit s, the lower
    bound l = 1/rho_0 and the percentage error 100 (s - l)/s. A failing row
    carries its error message and the sweep continues.

    :param q_grid: The q values, processed in order.
    :type q_grid: list[QParam]
    :param N_max: Largest order.
    :type N_max: int
    :param tol: Enclosure width and rho_0 tolerance.
    :type tol: mpf | None
    :param keep_sequences: Attach the per-N enclosures to each row.
    :type keep_sequences: bool
    :return: One row per q.
    :rtype: list[SweepRow]
    """
    rows = []
    for q in q_grid:
        try:
            seq = lambda_sequence(stieltjes_wigert(q), N_max, tol)
            limit = extrapolate(seq)
            l_bound = lower_bound(rho0_sw_fast(q, tol))
            rows.append(
                SweepRow(
                    q=q.q,
                    N_max=N_max,
                    lambda_last=seq.entries[-1].enclosure.midpoint,
                    s_extrapolated=limit.s,
                    s_err=limit.err,
                    l_bound=l_bound,
                    pct_error=100 * (limit.s - l_bound) / limit.s,
                    sequence=seq if keep_sequences else None,
                )
            )
        except HankelIndetError as err:
            logger.warning("sweep row q=%s failed: %s", mp.nstr(q.q, 6), err.detail)
            rows.append(SweepRow(q=q.q, N_max=N_max, error=err.detail))
    return rows


def determinacy_probe(src: MomentSource, N_max: int, tol=None) -> ProbeVerdict:
    """
    Heuristic reading of a finite lambda_N sequence: a plateau suggests an
    indeterminate problem, decay towards zero a determinate one.

    :param src: The moment source.
    :type src: MomentSource
    :param N_max: Largest order.
    :type N_max: int
    :param tol: Enclosure width.
    :type tol: mpf | None
    :return: The verdict with the ratios it was based on.
    :rtype: ProbeVerdict
    """
    if N_max < 4:
        return ProbeVerdict(verdict="inconclusive", note="heuristic: fewer than 5 orders")
    return classify(lambda_sequence(src, N_max, tol))


def classify(seq: LambdaSequence) -> ProbeVerdict:
    """Reads the determinacy verdict off an already computed sequence."""
    mids = seq.midpoints()
    if len(mids) < 5:
        return ProbeVerdict(verdict="inconclusive", note="heuristic: fewer than 5 orders")
    first, half, last = mids[0], mids[(len(mids) - 1) // 2], mids[-1]
    trend: Optional[mpf] = last / half if half > 0 else None
    if trend is not None and last >= PLATEAU_RATIO * half:
        verdict = "indeterminate-consistent"
    elif last <= DECAY_RATIO * first:
        verdict = "determinate-consistent"
    else:
        verdict = "inconclusive"
    return ProbeVerdict(trend=trend, verdict=verdict, lambda_0=first, lambda_half=half, lambda_last=last)
