"""Synthetic regression data for the seven simulation designs.

Rows of X are mean-zero Gaussian with a design-specific covariance. The first
9 coefficients (25 for the sparse factor design) equal one and the rest are
zero. The noise scale is set so that Var(x'beta) / Var(y) hits the requested
R^2 under the design's population covariance.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, InvalidArgumentError

GROUP_NOISE_VAR = 0.01
SPARSE_FACTOR_NOISE_VAR = 0.01
SPARSE_FACTOR_BLOCKS = 5
SPARSE_FACTOR_BLOCK_SIZE = 5


class Design(str, enum.Enum):
    IID = "IID"
    COMPOUND = "COMPOUND"
    AR1 = "AR1"
    FACTOR = "FACTOR"
    GROUP = "GROUP"
    EXTREME = "EXTREME"
    SPARSE_FACTOR = "SPARSE_FACTOR"


class ErrorLaw(str, enum.Enum):
    NORMAL = "NORMAL"
    SHIFTED_EXP = "SHIFTED_EXP"
    SCALED_T20 = "SCALED_T20"


def _coerce(cls, value):
    if isinstance(value, cls):
        return value
    return cls(str(value).strip().upper())


_MIN_P = {Design.GROUP: 9, Design.EXTREME: 10, Design.SPARSE_FACTOR: 25}


def true_model_size(design: Design) -> int:
    return 25 if design is Design.SPARSE_FACTOR else 9


@dataclass(frozen=True)
class SimSetting:
    design: Design
    n: int
    p: int
    r_squared: float
    error_law: ErrorLaw = ErrorLaw.NORMAL
    rho: float = 0.5
    factor_k: int = 10
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "design", _coerce(Design, self.design))
        except ValueError:
            raise ConfigError(f"unknown design {self.design!r}", field="design") from None
        try:
            object.__setattr__(self, "error_law", _coerce(ErrorLaw, self.error_law))
        except ValueError:
            raise ConfigError(f"unknown error law {self.error_law!r}", field="error_law") from None
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}", field="seed")
        if self.n < 3:
            raise ConfigError(f"n must be >= 3, got {self.n}", field="n")
        min_p = _MIN_P.get(self.design, 1)
        if self.p < min_p:
            raise ConfigError(f"{self.design.value} needs p >= {min_p}, got {self.p}", field="p")
        if not 0 < self.r_squared < 1:
            raise ConfigError(f"r_squared must lie in (0, 1), got {self.r_squared}",
                              field="r_squared")
        if not abs(self.rho) < 1:
            raise ConfigError(f"|rho| must be < 1, got {self.rho}", field="rho")
        if self.factor_k < 1:
            raise ConfigError(f"factor_k must be >= 1, got {self.factor_k}", field="factor_k")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["design"] = self.design.value
        d["error_law"] = self.error_law.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimSetting":
        known = {"design", "n", "p", "r_squared", "error_law", "rho", "factor_k", "seed"}
        unknown = set(d) - known
        if unknown:
            name = sorted(unknown)[0]
            raise ConfigError(f"unknown setting field {name!r}", field=name)
        for name in ("design", "n", "p", "r_squared"):
            if name not in d:
                raise ConfigError(f"setting is missing required field {name!r}", field=name)
        types = {"n": int, "p": int, "factor_k": int, "seed": int,
                 "r_squared": float, "rho": float}
        kwargs = {}
        for name, value in d.items():
            want = types.get(name)
            if want is int and (isinstance(value, bool) or not isinstance(value, int)):
                raise ConfigError(f"field {name!r} must be an integer", field=name)
            if want is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
                raise ConfigError(f"field {name!r} must be a number", field=name)
            kwargs[name] = float(value) if want is float else value
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SimSetting":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class GeneratedDataset:
    x_raw: np.ndarray
    y_raw: np.ndarray
    true_model: np.ndarray
    beta: np.ndarray
    noise_scale: float
    loadings: np.ndarray | None = field(default=None, repr=False)


def rng_for(seed: int, replication: int | None = None) -> np.random.Generator:
    """PCG64 stream for a base seed, optionally split off per replication.

    Replication streams come from SeedSequence spawn keys, so replication r
    sees the same stream however many replications run and in any order.
    """
    key = () if replication is None else (int(replication),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def _normal_f(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    # draw p x n and transpose: a Fortran-ordered n x p view with no copy
    return rng.standard_normal((p, n)).T


def _draw(setting: SimSetting, rng: np.random.Generator):
    n, p, rho = setting.n, setting.p, setting.rho
    design = setting.design
    loadings = None
    if design is Design.IID:
        x = _normal_f(rng, n, p)
    elif design is Design.COMPOUND:
        g = rng.standard_normal(n)
        x = math.sqrt(1 - rho) * _normal_f(rng, n, p)
        x += math.sqrt(rho) * g[:, None]
    elif design is Design.AR1:
        x = _normal_f(rng, n, p)
        innov = math.sqrt(1 - rho * rho)
        for j in range(1, p):
            x[:, j] *= innov
            x[:, j] += rho * x[:, j - 1]
    elif design is Design.FACTOR:
        k = setting.factor_k
        loadings = rng.standard_normal((p, k))
        g = rng.standard_normal((n, k))
        x = _normal_f(rng, n, p)
        x += g @ loadings.T
    elif design is Design.GROUP:
        z = rng.standard_normal((n, 3))
        x = _normal_f(rng, n, p)
        x[:, :9] *= math.sqrt(GROUP_NOISE_VAR)
        x[:, :9] += np.repeat(z, 3, axis=1)
    elif design is Design.EXTREME:
        x = _normal_f(rng, n, p)
        w = rng.standard_normal((n, 9))
        x[:, :9] += w
        x[:, :9] /= math.sqrt(2.0)
        x[:, 9:] += w.sum(axis=1)[:, None]
        x[:, 9:] /= 2.0
    elif design is Design.SPARSE_FACTOR:
        loadings = np.zeros((p, SPARSE_FACTOR_BLOCKS))
        for j in range(SPARSE_FACTOR_BLOCKS):
            rows = slice(SPARSE_FACTOR_BLOCK_SIZE * j, SPARSE_FACTOR_BLOCK_SIZE * (j + 1))
            loadings[rows, j] = rng.standard_normal(SPARSE_FACTOR_BLOCK_SIZE)
        g = rng.standard_normal((n, SPARSE_FACTOR_BLOCKS))
        x = math.sqrt(SPARSE_FACTOR_NOISE_VAR) * _normal_f(rng, n, p)
        x[:, :SPARSE_FACTOR_BLOCKS * SPARSE_FACTOR_BLOCK_SIZE] += (
            g @ loadings[:SPARSE_FACTOR_BLOCKS * SPARSE_FACTOR_BLOCK_SIZE].T
        )
    else:  # pragma: no cover - enum is closed
        raise InvalidArgumentError(f"unknown design {design!r}")
    return np.asfortranarray(x), loadings


def make_design(setting: SimSetting, rng: np.random.Generator) -> np.ndarray:
    """Draw the n x p predictor matrix (Fortran order)."""
    return _draw(setting, rng)[0]


def covariance(setting: SimSetting, cols=None, loadings: np.ndarray | None = None) -> np.ndarray:
    """Population covariance of the predictors restricted to ``cols``.

    Factor designs need the realized ``loadings`` matrix.
    """
    idx = np.arange(setting.p) if cols is None else np.asarray(cols, dtype=np.intp)
    d = setting.design
    m = len(idx)
    same = idx[:, None] == idx[None, :]
    if d is Design.IID:
        return np.eye(m)
    if d is Design.COMPOUND:
        return np.where(same, 1.0, setting.rho)
    if d is Design.AR1:
        return setting.rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)
    if d in (Design.FACTOR, Design.SPARSE_FACTOR):
        if loadings is None:
            raise InvalidArgumentError(f"{d.value} covariance depends on the realized loadings")
        f = loadings[idx]
        nugget = 1.0 if d is Design.FACTOR else SPARSE_FACTOR_NOISE_VAR
        return f @ f.T + nugget * np.eye(m)
    if d is Design.GROUP:
        grp = np.where(idx < 9, idx // 3, -1 - idx)  # unique negative id outside groups
        cov = np.where(grp[:, None] == grp[None, :], 1.0, 0.0)
        structured = idx < 9
        cov[np.diag_indices(m)] += np.where(structured, GROUP_NOISE_VAR, 0.0)
        return cov
    if d is Design.EXTREME:
        head = idx < 9
        hh = np.where(same, 1.0, 0.0)
        tt = np.where(same, 10.0 / 4.0, 9.0 / 4.0)
        ht = np.full((m, m), 1.0 / (2.0 * math.sqrt(2.0)))
        cov = np.where(head[:, None] & head[None, :], hh,
                       np.where(~head[:, None] & ~head[None, :], tt, ht))
        return cov
    raise InvalidArgumentError(f"unknown design {d!r}")  # pragma: no cover


def make_beta(setting: SimSetting) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient vector and the true-model index set."""
    size = true_model_size(setting.design)
    if setting.p < size:
        raise ConfigError(f"p={setting.p} is smaller than the true model size {size}", field="p")
    t = np.arange(size)
    beta = np.zeros(setting.p)
    beta[t] = 1.0
    return beta, t


def signal_variance(setting: SimSetting, beta, loadings: np.ndarray | None = None) -> float:
    """Var(x'beta) under the population covariance."""
    beta = np.asarray(beta, dtype=np.float64)
    support = np.flatnonzero(beta)
    b = beta[support]
    return float(b @ covariance(setting, support, loadings) @ b)


def calibrate_noise(setting: SimSetting, beta, loadings: np.ndarray | None = None) -> float:
    """Noise SD giving Var(x'beta) / Var(y) = r_squared for unit-variance errors."""
    r2 = setting.r_squared
    if not 0 < r2 < 1:
        raise InvalidArgumentError(f"r_squared must lie in (0, 1), got {r2}")
    v = signal_variance(setting, beta, loadings)
    return math.sqrt(v * (1 - r2) / r2)


def sample_error(law: ErrorLaw | str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Mean-zero, unit-variance errors."""
    law = _coerce(ErrorLaw, law)
    if law is ErrorLaw.NORMAL:
        return rng.standard_normal(n)
    if law is ErrorLaw.SHIFTED_EXP:
        return rng.standard_exponential(n) - 1.0
    if law is ErrorLaw.SCALED_T20:
        return rng.standard_t(20, n) / math.sqrt(20.0 / 18.0)
    raise InvalidArgumentError(f"unknown error law {law!r}")  # pragma: no cover


def generate(setting: SimSetting, replication: int | None = None) -> GeneratedDataset:
    """Draw one dataset; a pure function of the setting and replication index."""
    rng = rng_for(setting.seed, replication)
    x, loadings = _draw(setting, rng)
    beta, t = make_beta(setting)
    sigma = calibrate_noise(setting, beta, loadings)
    y = x[:, t].sum(axis=1) + sigma * sample_error(setting.error_law, setting.n, rng)
    return GeneratedDataset(x, y, t, beta, sigma, loadings)
