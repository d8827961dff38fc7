"""Monte-Carlo comparison of screening methods.

Each replication draws a dataset from its own derived seed, standardizes it
once, runs every configured method on it and records how much of the true
model the screened submodel kept. Coverage probability (CP) is the fraction
of replications whose submodel contains the whole true model; true positive
rate (TPR) is the average fraction of true variables kept.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _backend
from .datagen import Design, SimSetting, generate
from .errors import ConfigError, InvalidArgumentError, RpcScreenError
from .screening import (
    Method,
    RpcComponents,
    StandardizedData,
    fr_screen,
    lambda_presets,
    rpc_fast,
    select_top_k,
    sis_scores,
    standardize,
    union_submodels,
)

METHOD_NAMES = ("RPC1", "RPC2", "RPC3", "URPC", "HOLP", "SIS", "FR")

# column headers used for the designs in printed tables
DESIGN_LABELS = {
    Design.IID: "IID",
    Design.COMPOUND: "Compound",
    Design.GROUP: "Group",
    Design.AR1: "AR",
    Design.FACTOR: "Factor",
    Design.EXTREME: "ExtrCor",
    Design.SPARSE_FACTOR: "SpFactor",
}


@dataclass(frozen=True)
class MethodSpec:
    """A named method; ``lam`` overrides the penalty for RPC*/HOLP."""

    name: str
    lam: float | None = None

    def __post_init__(self):
        name = self.name.upper()
        if name not in METHOD_NAMES:
            raise ConfigError(f"unknown method {self.name!r}; expected one of {METHOD_NAMES}",
                              field="methods")
        object.__setattr__(self, "name", name)
        if self.lam is not None:
            if name not in ("RPC1", "RPC2", "RPC3", "HOLP"):
                raise ConfigError(f"method {name} takes no lambda", field="methods")
            if not self.lam > 0:
                raise ConfigError(f"lambda for {name} must be positive", field="methods")

    @classmethod
    def parse(cls, item) -> "MethodSpec":
        if isinstance(item, MethodSpec):
            return item
        if isinstance(item, str):
            return cls(item)
        if isinstance(item, dict):
            extra = set(item) - {"name", "lambda"}
            if "name" not in item or extra:
                raise ConfigError(f"bad method entry {item!r}", field="methods")
            lam = item.get("lambda")
            if lam is not None and (isinstance(lam, bool) or not isinstance(lam, (int, float))):
                raise ConfigError(f"lambda for {item['name']} must be a number", field="methods")
            return cls(str(item["name"]), None if lam is None else float(lam))
        raise ConfigError(f"bad method entry {item!r}", field="methods")

    @property
    def label(self) -> str:
        """Result key; an explicit penalty is part of it so RPC1 and RPC1[lambda=2.5] can coexist."""
        return self.name if self.lam is None else f"{self.name}[lambda={self.lam:g}]"

    def to_json(self):
        return self.name if self.lam is None else {"name": self.name, "lambda": self.lam}


@dataclass(frozen=True)
class BenchmarkPlan:
    settings: tuple[SimSetting, ...]
    replications: int
    methods: tuple[MethodSpec, ...]
    k: int | None = None

    def __post_init__(self):
        if not self.settings:
            raise ConfigError("plan has no settings", field="settings")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1", field="replications")
        if not self.methods:
            raise ConfigError("method list is empty", field="methods")
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            dup = next(x for x in labels if labels.count(x) > 1)
            raise ConfigError(f"method {dup} listed twice", field="methods")
        if self.k is not None:
            for s in self.settings:
                if not 1 <= self.k <= s.p:
                    raise ConfigError(f"k={self.k} outside [1, p={s.p}]", field="k")

    def k_for(self, setting: SimSetting) -> int:
        return setting.n if self.k is None else self.k

    def with_seed(self, seed: int) -> "BenchmarkPlan":
        settings = tuple(SimSetting(**{**s.to_dict(), "seed": seed}) for s in self.settings)
        return BenchmarkPlan(settings, self.replications, self.methods, self.k)

    @classmethod
    def from_dict(cls, d: Mapping) -> "BenchmarkPlan":
        if not isinstance(d, Mapping):
            raise ConfigError("plan must be a JSON object", field="plan")
        extra = set(d) - {"setting", "settings", "replications", "methods", "k", "description"}
        if extra:
            name = sorted(extra)[0]
            raise ConfigError(f"unknown plan field {name!r}", field=name)
        if ("setting" in d) == ("settings" in d):
            raise ConfigError("plan needs exactly one of 'setting' or 'settings'", field="settings")
        raw = [d["setting"]] if "setting" in d else d["settings"]
        if not isinstance(raw, list) or not all(isinstance(s, dict) for s in raw):
            raise ConfigError("settings must be a list of objects", field="settings")
        settings = tuple(SimSetting.from_dict(s) for s in raw)
        reps = d.get("replications")
        if isinstance(reps, bool) or not isinstance(reps, int):
            raise ConfigError("replications must be an integer", field="replications")
        methods = d.get("methods")
        if not isinstance(methods, list):
            raise ConfigError("methods must be a list", field="methods")
        k = d.get("k")
        if k is not None and (isinstance(k, bool) or not isinstance(k, int)):
            raise ConfigError("k must be an integer or null", field="k")
        return cls(settings, reps, tuple(MethodSpec.parse(m) for m in methods), k)

    @classmethod
    def from_json(cls, text: str) -> "BenchmarkPlan":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"plan is not valid JSON: {exc}", field="plan") from None
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return {
            "settings": [s.to_dict() for s in self.settings],
            "replications": self.replications,
            "methods": [m.to_json() for m in self.methods],
            "k": self.k,
        }


@dataclass(frozen=True)
class MethodOutcome:
    selected: np.ndarray
    hits: int
    covered: bool
    runtime_ms: float


@dataclass(frozen=True)
class ReplicationOutcome:
    replication: int
    true_size: int
    methods: dict[str, MethodOutcome]


class _RpcCache:
    """Per-replication cache of RPC components keyed by penalty, with timings."""

    def __init__(self, data: StandardizedData, threads: int):
        self.data = data
        self.threads = threads
        self._store: dict[float, tuple[RpcComponents, float]] = {}

    def get(self, lam: float) -> tuple[RpcComponents, float]:
        if lam not in self._store:
            t0 = time.perf_counter()
            comps = rpc_fast(self.data, lam, self.threads)
            self._store[lam] = (comps, (time.perf_counter() - t0) * 1e3)
        return self._store[lam]


def _run_method(spec: MethodSpec, data: StandardizedData, k: int, cache: _RpcCache):
    presets = lambda_presets(data.n, data.p)
    name = spec.name
    if name.startswith("RPC"):
        lam = spec.lam if spec.lam is not None else presets[int(name[3]) - 1]
        comps, ms = cache.get(lam)
        t0 = time.perf_counter()
        res = select_top_k(comps.scores, k, Method.RPC, lam)
        return res, ms + (time.perf_counter() - t0) * 1e3
    if name == "URPC":
        parts, ms = [], 0.0
        for lam in presets:
            comps, elapsed = cache.get(lam)
            ms += elapsed
            parts.append(select_top_k(comps.scores, k, Method.RPC, lam))
        t0 = time.perf_counter()
        res = union_submodels(parts)
        return res, ms + (time.perf_counter() - t0) * 1e3
    if name == "HOLP":
        lam = spec.lam if spec.lam is not None else presets[0]
        comps, ms = cache.get(lam)
        t0 = time.perf_counter()
        res = select_top_k(comps.beta_hat, k, Method.HOLP, lam)
        return res, ms + (time.perf_counter() - t0) * 1e3
    t0 = time.perf_counter()
    if name == "SIS":
        res = select_top_k(sis_scores(data), k, Method.SIS)
    elif name == "FR":
        res = fr_screen(data, min(k, data.n - 2, data.p))
    else:  # pragma: no cover - MethodSpec validates names
        raise InvalidArgumentError(f"unknown method {name}")
    return res, (time.perf_counter() - t0) * 1e3


def run_replication(setting: SimSetting, rep_index: int, methods: Sequence[MethodSpec],
                    k: int, threads: int | None = None) -> ReplicationOutcome:
    """Generate replication ``rep_index`` and screen it with every method.

    Wall time per method excludes data generation and standardization; RPC
    components computed for one method are reused (and their time charged)
    by any other method needing the same penalty.
    """
    threads = threads or 1
    ds = generate(setting, rep_index)
    data = standardize(ds.x_raw, ds.y_raw)
    data.gram  # shared by every ridge penalty; computed outside the timed region
    cache = _RpcCache(data, threads)
    truth = set(int(i) for i in ds.true_model)
    out = {}
    for spec in methods:
        try:
            res, ms = _run_method(spec, data, k, cache)
        except RpcScreenError as exc:
            raise type(exc)(
                f"replication {rep_index} ({setting.design.value}), method {spec.label}: {exc}"
            ) from exc
        hits = len(truth.intersection(int(i) for i in res.selected))
        out[spec.label] = MethodOutcome(res.selected, hits, hits == len(truth), ms)
    return ReplicationOutcome(rep_index, len(truth), out)


@dataclass(frozen=True)
class MethodMetrics:
    cp: float
    tpr: float
    mean_runtime_ms: float
    replications: int


@dataclass
class MetricsSummary:
    """CP/TPR per method for one setting."""

    setting: SimSetting | None
    methods: dict[str, MethodMetrics] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "setting": None if self.setting is None else self.setting.to_dict(),
            "methods": {
                name: {"cp": m.cp, "tpr": m.tpr, "mean_runtime_ms": m.mean_runtime_ms,
                       "replications": m.replications}
                for name, m in self.methods.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsSummary":
        setting = None if d.get("setting") is None else SimSetting.from_dict(d["setting"])
        return cls(setting, {name: MethodMetrics(**m) for name, m in d["methods"].items()})


def aggregate(outcomes: Iterable[ReplicationOutcome],
              setting: SimSetting | None = None) -> MetricsSummary:
    """Fold replication outcomes into CP and TPR per method."""
    outcomes = sorted(outcomes, key=lambda o: o.replication)
    if not outcomes:
        raise InvalidArgumentError("no replications to aggregate")
    names = list(outcomes[0].methods)
    summary = MetricsSummary(setting)
    reps = len(outcomes)
    for name in names:
        covered = sum(o.methods[name].covered for o in outcomes)
        tpr = sum(o.methods[name].hits / o.true_size for o in outcomes) / reps
        ms = sum(o.methods[name].runtime_ms for o in outcomes) / reps
        summary.methods[name] = MethodMetrics(covered / reps, tpr, ms, reps)
    return summary


def run_setting(setting: SimSetting, replications: int, methods: Sequence[MethodSpec],
                k: int | None = None, threads: int | None = None,
                start: int = 0) -> list[ReplicationOutcome]:
    """Run replications ``start .. start + replications - 1`` of one setting.

    Replications are spread over a thread pool; the worker budget is split
    between replication-level and kernel-level parallelism.
    """
    methods = [MethodSpec.parse(m) for m in methods]
    k = setting.n if k is None else k
    budget = threads or _backend.get_num_threads()
    workers = max(1, min(budget, replications))
    inner = max(1, budget // workers)
    indices = range(start, start + replications)
    if workers == 1:
        return [run_replication(setting, r, methods, k, inner) for r in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: run_replication(setting, r, methods, k, inner), indices))


def setting_label(setting: SimSetting) -> str:
    return DESIGN_LABELS[setting.design]


def run_plan(plan: BenchmarkPlan, threads: int | None = None) -> dict[str, MetricsSummary]:
    """Run every setting in the plan; keys are table column labels."""
    results: dict[str, MetricsSummary] = {}
    for setting in plan.settings:
        label = setting_label(setting)
        if label in results:
            label = f"{label} R2={setting.r_squared:g} {setting.error_law.value}"
        outcomes = run_setting(setting, plan.replications, plan.methods,
                               plan.k_for(setting), threads)
        results[label] = aggregate(outcomes, setting)
    return results


def summaries_to_json(summaries: Mapping[str, MetricsSummary]) -> str:
    return json.dumps({label: s.to_dict() for label, s in summaries.items()}, indent=2)


def emit_table(summaries: Mapping[str, MetricsSummary], fmt: str = "text") -> str:
    """Methods as rows, TPR and CP (percent, one decimal) per setting as columns."""
    if not summaries:
        raise InvalidArgumentError("no summaries to tabulate")
    if fmt not in ("text", "csv"):
        raise InvalidArgumentError(f"unknown table format {fmt!r}; use 'text' or 'csv'")
    labels = list(summaries)
    methods: list[str] = []
    for s in summaries.values():
        methods.extend(m for m in s.methods if m not in methods)
    header = ["Method"]
    for label in labels:
        header += [f"{label} TPR", f"{label} CP"]
    rows = []
    for name in methods:
        row = [name]
        for label in labels:
            m = summaries[label].methods.get(name)
            row += ["" if m is None else f"{100 * m.tpr:.1f}",
                    "" if m is None else f"{100 * m.cp:.1f}"]
        rows.append(row)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [
        "  ".join(cell.ljust(w) if i == 0 else cell.rjust(w)
                  for i, (cell, w) in enumerate(zip(r, widths))).rstrip()
        for r in [header] + rows
    ]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"
