"""Experiment configuration, Monte Carlo drivers, and persistence.

The ``maximal-rarity`` driver samples random sections per degree, counts
the components of their real zero curves with certification, audits the
Harnack-Klein bound on every certified trial, and aggregates membership
frequencies of the near-maximal set b0 >= g + 1 - a n with Wilson
intervals.  Uncertified samples are excluded from both numerator and
denominator (the discard rate is published, and a pessimistic frequency
counting discards as members brackets the bias).

Determinism: trials draw from counter-based streams keyed by (seed,
degree, trial), aggregation uses exact counters and compensated sums in
trial order, and workers only partition the trial range, so any worker
count yields identical records.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .concentration import get_sampler, wilson_interval
from .ensemble import build_orthonormal_basis, default_order, sample_section
from .geometry import Weight
from .topology import classify_maximality, count_components, genus, harnack_bound

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "estimate_maximal_probability",
    "rarity_trend",
    "persist_run",
    "load_run",
    "derive_seed",
]

_CONFIG_KEYS = (
    "experiment",
    "weight",
    "degrees",
    "sampler",
    "a",
    "trials",
    "max_depth",
    "quadrature_order",
    "seed",
    "output_dir",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat configuration; round-trips losslessly through its text form."""

    experiment: str
    weight: str = "fubini-study"
    degrees: tuple = (3, 4, 5)
    sampler: str = "gaussian"
    a: float = 0.1
    trials: int = 1000
    max_depth: int = 12
    quadrature_order: int = 0  # 0 means the per-degree default 2n + 8
    seed: int = 20260810
    output_dir: str = "runs"

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("a must be > 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        degrees = tuple(int(d) for d in self.degrees)
        if not degrees or any(d < 1 or d > 10 for d in degrees):
            raise ValueError("degrees must lie in 1..10")
        object.__setattr__(self, "degrees", degrees)
        Weight.from_spec(self.weight)  # validate
        get_sampler(self.sampler)

    def to_text(self) -> str:
        vals = {
            "experiment": self.experiment,
            "weight": self.weight,
            "degrees": ",".join(str(d) for d in self.degrees),
            "sampler": self.sampler,
            "a": repr(self.a),
            "trials": str(self.trials),
            "max_depth": str(self.max_depth),
            "quadrature_order": str(self.quadrature_order),
            "seed": str(self.seed),
            "output_dir": self.output_dir,
        }
        return "".join(f"{k} = {vals[k]}\n" for k in _CONFIG_KEYS)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        data = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            if key in data:
                raise ValueError(f"line {lineno}: duplicate key {key!r}")
            data[key] = value
        if "experiment" not in data:
            raise ValueError("missing required key 'experiment'")
        kwargs = {"experiment": data["experiment"]}
        if "weight" in data:
            kwargs["weight"] = data["weight"]
        if "degrees" in data:
            kwargs["degrees"] = tuple(int(t) for t in data["degrees"].split(",") if t.strip())
        if "sampler" in data:
            kwargs["sampler"] = data["sampler"]
        for key, conv in (("a", float), ("trials", int), ("max_depth", int),
                          ("quadrature_order", int), ("seed", int)):
            if key in data:
                kwargs[key] = conv(data[key])
        if "output_dir" in data:
            kwargs["output_dir"] = data["output_dir"]
        return cls(**kwargs)


@dataclass(frozen=True)
class RunRecord:
    config: dict
    rows: tuple
    wall_time: float
    version: str = __version__

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "rows": list(self.rows),
            "wall_time": self.wall_time,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            config=d["config"],
            rows=tuple(d["rows"]),
            wall_time=d["wall_time"],
            version=d.get("version", "?"),
        )


def derive_seed(seed: int, n: int) -> int:
    """Per-degree stream key (splitmix-style mix, stable across runs)."""
    x = (seed * 0x9E3779B97F4A7C15 + n * 0xBF58476D1CE4E5B9) % (1 << 63)
    return int(x)


def _run_trials(args):
    """Worker: count components for a contiguous trial range of one degree."""
    (n, weight_spec, order, seed, lo, hi, sampler_kind, max_depth, a) = args
    weight = Weight.from_spec(weight_spec)
    onb = build_orthonormal_basis(n, weight, order=order if order else default_order(n))
    sampler = get_sampler(sampler_kind)
    dseed = derive_seed(seed, n)
    out = []
    for trial in range(lo, hi):
        s = sample_section(onb, sampler, seed=dseed, trial=trial)
        rep = count_components(s, onb, max_depth=max_depth)
        if rep.certified:
            if rep.b0 > harnack_bound(n):  # audited on every certified trial
                raise AssertionError(
                    f"component bound violated: n={n} trial={trial} b0={rep.b0}"
                )
            verdict = classify_maximality(rep, a)
            out.append((trial, True, rep.b0, verdict.in_M, rep.b0 == harnack_bound(n)))
        else:
            out.append((trial, False, rep.b0, False, False))
    return out


def estimate_maximal_probability(
    cfg: ExperimentConfig, workers: int = 1, progress=None
) -> RunRecord:
    """Monte Carlo frequency of the near-maximal set per degree."""
    t0 = time.monotonic()
    rows = []
    for n in cfg.degrees:
        order = cfg.quadrature_order if cfg.quadrature_order else default_order(n)
        chunks = []
        if workers <= 1:
            ranges = [(0, cfg.trials)]
        else:
            step = (cfg.trials + workers - 1) // workers
            ranges = [(i, min(i + step, cfg.trials)) for i in range(0, cfg.trials, step)]
        payloads = [
            (n, cfg.weight, order, cfg.seed, lo, hi, cfg.sampler, cfg.max_depth, cfg.a)
            for lo, hi in ranges
        ]
        if workers <= 1:
            for p in payloads:
                chunks.append(_run_trials(p))
        else:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
                chunks = list(ex.map(_run_trials, payloads))
        results = sorted(t for chunk in chunks for t in chunk)
        certified = sum(1 for r in results if r[1])
        discarded = cfg.trials - certified
        members = sum(1 for r in results if r[1] and r[3])
        exact = sum(1 for r in results if r[1] and r[4])
        b0_sum = math.fsum(float(r[2]) for r in results if r[1])
        mean_b0 = b0_sum / certified if certified else float("nan")
        freq = members / certified if certified else float("nan")
        lo_ci, hi_ci = wilson_interval(members, certified) if certified else (0.0, 1.0)
        aborted = discarded / cfg.trials > 0.2
        rows.append(
            {
                "n": n,
                "trials": cfg.trials,
                "certified": certified,
                "discarded": discarded,
                "aborted": aborted,
                "mean_b0": mean_b0,
                "freq_in_M": freq,
                "wilson_lo": lo_ci,
                "wilson_hi": hi_ci,
                "freq_exact_max": exact / certified if certified else float("nan"),
                "freq_in_M_pessimistic": (members + discarded) / cfg.trials,
            }
        )
        if progress is not None:
            progress(rows[-1])
    return RunRecord(
        config=dataclasses.asdict(cfg) | {"degrees": list(cfg.degrees)},
        rows=tuple(rows),
        wall_time=time.monotonic() - t0,
    )


def rarity_trend(record: RunRecord, min_degrees: int = 3, min_certified: int = 1000) -> dict:
    """Monotonicity verdict for the membership frequency across degrees.

    'increasing' needs one significant increase at 95% (a failure for the
    decay experiments), 'non-increasing' needs weakly decreasing point
    estimates with no significant increase, anything else (interval
    overlap with a point-estimate rise) is reported 'inconclusive'.
    """
    rows = [r for r in record.rows if not r["aborted"]]
    if len(rows) < min_degrees:
        raise ValueError(f"need at least {min_degrees} degrees, have {len(rows)}")
    for r in rows:
        if r["certified"] < min_certified:
            raise ValueError(
                f"degree {r['n']} has only {r['certified']} certified samples"
            )
    sig_increase = False
    weakly_decreasing = True
    log_diffs = []
    for prev, cur in zip(rows, rows[1:]):
        if cur["wilson_lo"] > prev["wilson_hi"]:
            sig_increase = True
        if cur["freq_in_M"] > prev["freq_in_M"]:
            weakly_decreasing = False
        if prev["freq_in_M"] > 0 and cur["freq_in_M"] > 0:
            log_diffs.append(math.log(cur["freq_in_M"]) - math.log(prev["freq_in_M"]))
        else:
            log_diffs.append(float("nan"))
    if sig_increase:
        verdict = "increasing"
    elif weakly_decreasing:
        verdict = "non-increasing"
    else:
        verdict = "inconclusive"
    return {
        "verdict": verdict,
        "log_freq_diffs": log_diffs,
        "degrees": [r["n"] for r in rows],
        "frequencies": [r["freq_in_M"] for r in rows],
    }


# ---------------------------------------------------------------------------
# persistence

_CSV_COLUMNS = (
    "n",
    "trials",
    "certified",
    "discarded",
    "aborted",
    "mean_b0",
    "freq_in_M",
    "wilson_lo",
    "wilson_hi",
    "freq_exact_max",
    "freq_in_M_pessimistic",
)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def record_table_csv(record: RunRecord) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for row in record.rows:
        lines.append(",".join(_fmt(row[c]) for c in _CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def persist_run(record: RunRecord, out_dir: str, force: bool = False) -> dict:
    """Write run.json, table.csv and config.echo under out_dir/<experiment>.

    The parent directory must exist; an existing run id is refused without
    ``force``.  Files are written to temporaries and renamed, so a crash
    cannot leave a half-written run behind.
    """
    if not os.path.isdir(out_dir):
        raise FileNotFoundError(f"output directory {out_dir!r} does not exist")
    run_id = record.config["experiment"]
    target = os.path.join(out_dir, run_id)
    if os.path.exists(target) and not force:
        raise FileExistsError(f"run {run_id!r} already exists (use force to overwrite)")
    os.makedirs(target, exist_ok=True)
    files = {
        "run.json": json.dumps(record.to_dict(), indent=1, sort_keys=True) + "\n",
        "table.csv": record_table_csv(record),
        "config.echo": ExperimentConfig(
            **{k: record.config[k] for k in _CONFIG_KEYS if k in record.config}
        ).to_text(),
    }
    written = {}
    for name, content in files.items():
        path = os.path.join(target, name)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
        os.replace(tmp, path)
        written[name] = path
    return written


def load_run(path: str) -> RunRecord:
    with open(os.path.join(path, "run.json"), "r", encoding="utf-8") as fh:
        return RunRecord.from_dict(json.load(fh))
