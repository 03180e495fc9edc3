from pathlib import Path
from typing import Annotated, Any, Literal, Optional

import mpmath
from mpmath import mp, mpf
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from src.conf.config import settings


def _to_real(value: Any) -> mpf:
    if isinstance(value, mpf):
        return value
    if isinstance(value, str):
        return mpf(value.strip())
    try:
        converted = mpmath.mpmathify(value)
    except TypeError as err:
        raise ValueError(f"expected a real number, got {value!r}") from err
    if not isinstance(converted, mpf):
        raise ValueError(f"expected a real number, got {value!r}")
    return converted


def _to_number(value: Any):
    if isinstance(value, str):
        value = value.strip()
    try:
        return mpmath.mpmathify(value)
    except TypeError as err:
        raise ValueError(f"expected a number, got {value!r}") from err


MpReal = Annotated[mpf, BeforeValidator(_to_real)]
MpNumber = Annotated[Any, BeforeValidator(_to_number)]

FAMILIES = (
    "stieltjes-wigert",
    "al-salam-carlitz",
    "freud-quartic",
    "q-inverse-hermite",
    "file",
    "jacobi",
)
Q_FAMILIES = ("stieltjes-wigert", "al-salam-carlitz", "q-inverse-hermite")


class MpModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class Precision(MpModel):
    bits: int = Field(ge=64)

    def context(self):
        return mp.workprec(self.bits)


class QParam(MpModel):
    q: MpReal
    k_weight: Optional[MpReal] = None

    @model_validator(mode="before")
    @classmethod
    def fill_q_from_weight(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("q") is None and data.get("k_weight") is not None:
            k = _to_real(data["k_weight"])
            if k <= 0:
                raise ValueError("k_weight must be positive")
            data = dict(data, q=mp.exp(-1 / (2 * k**2)))
        return data

    @model_validator(mode="after")
    def check_range(self) -> "QParam":
        if not 0 < self.q < 1:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        if self.k_weight is not None:
            expected = mp.exp(-1 / (2 * self.k_weight**2))
            if abs(expected - self.q) > mpf(2) ** (8 - mp.prec):
                raise ValueError("q and k_weight violate q = exp(-1/(2k^2))")
        return self

    @classmethod
    def of(cls, q) -> "QParam":
        if isinstance(q, QParam):
            return q
        return cls(q=q)


class SeriesValue(MpModel):
    value: MpNumber
    err: MpReal

    @field_validator("err")
    @classmethod
    def finite_nonnegative(cls, v: mpf) -> mpf:
        if not mp.isfinite(v) or v < 0:
            raise ValueError(f"error bound must be finite and nonnegative, got {v}")
        return v


class SymmetricMatrix(MpModel):
    entries: list[list[MpReal]]

    @field_validator("entries")
    @classmethod
    def square_symmetric(cls, rows: list[list[mpf]]) -> list[list[mpf]]:
        n = len(rows)
        if n == 0:
            raise ValueError("matrix must have order at least 1")
        for j, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("matrix must be square")
            for k in range(j):
                if row[k] != rows[k][j]:
                    raise ValueError(f"matrix is not symmetric at ({j}, {k})")
        return rows

    @property
    def order(self) -> int:
        return len(self.entries)

    def entry(self, j: int, k: int) -> mpf:
        return self.entries[j][k]

    def rows(self) -> list[list[mpf]]:
        return [list(row) for row in self.entries]

    def diagonal(self) -> list[mpf]:
        return [self.entries[k][k] for k in range(self.order)]


class HankelMatrix(SymmetricMatrix):
    moments: list[MpReal]

    @classmethod
    def from_moments(cls, moments: list[mpf], N: int) -> "HankelMatrix":
        if len(moments) < 2 * N + 1:
            raise ValueError(f"order {N} needs moments through index {2 * N}")
        used = list(moments[: 2 * N + 1])
        entries = [[used[j + k] for k in range(N + 1)] for j in range(N + 1)]
        return cls(entries=entries, moments=used)


class KernelMatrix(SymmetricMatrix):
    pass


class CoeffTriangle(MpModel):
    rows: list[list[MpReal]]

    @field_validator("rows")
    @classmethod
    def lower_triangular(cls, rows: list[list[mpf]]) -> list[list[mpf]]:
        for k, row in enumerate(rows):
            if len(row) != k + 1:
                raise ValueError(f"row {k} must hold {k + 1} coefficients")
            if row[k] <= 0:
                raise ValueError(f"leading coefficient of p_{k} must be positive")
        return rows

    @property
    def N(self) -> int:
        return len(self.rows) - 1

    def beta(self, k: int, j: int) -> mpf:
        return self.rows[k][j]


class EigenEnclosure(MpModel):
    lo: MpReal
    hi: MpReal
    probes: int = Field(ge=0)
    prec_bits: int = 0

    @model_validator(mode="after")
    def ordered(self) -> "EigenEnclosure":
        if self.lo > self.hi:
            raise ValueError("enclosure must satisfy lo <= hi")
        return self

    @property
    def midpoint(self) -> mpf:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> mpf:
        return self.hi - self.lo


class SpectralReport(MpModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, populate_by_name=True)

    lambda_: EigenEnclosure = Field(alias="lambda")
    mu: MpReal
    mu_shifted: MpReal
    trace_bound: MpReal


class RhoValue(MpModel):
    value: MpReal
    err: MpReal
    route: str
    family: str = ""

    @field_validator("value")
    @classmethod
    def positive(cls, v: mpf) -> mpf:
        if v <= 0:
            raise ValueError("rho_0 must be positive")
        return v


class RouteComparison(MpModel):
    first: RhoValue
    second: RhoValue
    diff: MpReal
    combined_err: MpReal
    agree: bool


class CircleDensitySample(MpModel):
    theta: MpReal
    value: MpReal
    err: MpReal = mpf(0)


class ASCParam(MpModel):
    q: QParam
    a: MpReal

    @model_validator(mode="after")
    def admissible(self) -> "ASCParam":
        q = self.q.q
        if not q < self.a < 1 / q:
            raise ValueError(f"a must satisfy q < a < 1/q, got a={self.a}")
        return self


class FreudConstants(MpModel):
    K0: MpReal


class JacobiCoefficients(MpModel):
    diagonal: list[MpReal]
    off_diagonal: list[MpReal]
    s0: MpReal = mpf(1)


class LambdaEntry(MpModel):
    N: int
    enclosure: EigenEnclosure
    prec_bits: int


class LambdaSequence(MpModel):
    q: Optional[QParam] = None
    entries: list[LambdaEntry]

    def midpoints(self) -> list[mpf]:
        return [entry.enclosure.midpoint for entry in self.entries]


class Extrapolation(MpModel):
    s: MpReal
    err: MpReal
    method: Literal["aitken", "fallback"]


class SweepRow(MpModel):
    q: MpReal
    N_max: int
    lambda_last: Optional[MpReal] = None
    s_extrapolated: Optional[MpReal] = None
    s_err: Optional[MpReal] = None
    l_bound: Optional[MpReal] = None
    pct_error: Optional[MpReal] = None
    error: Optional[str] = None
    sequence: Optional[LambdaSequence] = None


class ProbeVerdict(MpModel):
    trend: Optional[MpReal] = None
    verdict: Literal["indeterminate-consistent", "determinate-consistent", "inconclusive"]
    lambda_0: Optional[MpReal] = None
    lambda_half: Optional[MpReal] = None
    lambda_last: Optional[MpReal] = None
    note: str = "heuristic: a finite number of orders cannot decide the limit"


class SuiteResult(BaseModel):
    suite: str
    passed: bool
    checks: int = 0
    detail: str = ""


class RunConfig(BaseModel):
    family: Optional[Literal[FAMILIES]] = None
    q: Optional[str] = None
    a: Optional[str] = None
    k_weight: Optional[str] = None
    n_max: int = Field(default=settings.n_max, ge=0)
    prec_bits: int = Field(default=settings.prec_bits, ge=64)
    tol: str = settings.tol
    output: Literal["csv", "json"] = "csv"
    out_path: Optional[Path] = None
    path: Optional[Path] = None
    q_grid: str = settings.q_grid
    suite: Optional[str] = None
    verbose: bool = False

    @field_validator("q", "a", "k_weight", "tol")
    @classmethod
    def numeric(cls, v: Optional[str]) -> Optional[str]:
        if v is not None:
            float(v)
        return v

    @model_validator(mode="after")
    def family_requirements(self) -> "RunConfig":
        if self.q is not None and not 0 < float(self.q) < 1:
            raise ValueError("--q must lie in (0, 1)")
        if self.family in Q_FAMILIES and self.q is None and self.k_weight is None:
            raise ValueError(f"family {self.family} needs --q or --k-weight")
        if self.family == "al-salam-carlitz" and self.a is None:
            raise ValueError("family al-salam-carlitz needs --a")
        if self.family in ("file", "jacobi") and self.path is None:
            raise ValueError(f"family {self.family} needs --path")
        if float(self.tol) <= 0:
            raise ValueError("--tol must be positive")
        if self.q is not None or self.k_weight is not None:
            with mp.workprec(self.prec_bits):
                try:
                    self.q_param()
                except ValidationError as err:
                    raise ValueError("; ".join(error["msg"] for error in err.errors()))
        return self

    def q_param(self) -> QParam:
        """
        Parses q (or the weight parameter k) once, at the current working precision.

        :return: The parsed q parameter.
        :rtype: QParam
        """
        if self.q is not None:
            return QParam(q=self.q, k_weight=self.k_weight)
        return QParam(q=None, k_weight=self.k_weight)

    def tol_value(self) -> mpf:
        return mpf(self.tol)
