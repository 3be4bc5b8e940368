"""Monte Carlo BLER experiments for ORBGRAND-AI over Gauss-Markov channels.

Every (code, rho, Eb/N0, b) cell owns a random stream keyed by a hash of
the cell parameters and the base seed, so adding cells never changes the
numbers of existing ones. Trials run in fixed-size batches; batch ``j`` of
a cell draws from ``SeedSequence([base_seed, cell_key, j])``. Batches are
committed in index order and the stopping rule is applied trial by trial
inside the committed stream, so results do not depend on the number of
worker processes.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
from scipy import stats

from .channel import MAX_RHO, GaussMarkovChannel, block_entropy_rate, ebno_to_sigma, entropy_rate, modulate_bpsk, transmit
from .codes import LinearCode, code_from_config, encode
from .decoder import DEFAULT_TAU, OrbgrandAIDecoder

log = logging.getLogger(__name__)

CSV_FIELDS = ("rho", "ebno_db", "b", "n", "k", "rate", "trials", "errors", "bler", "mean_guesses", "abandon_rate")
ENTROPY_FIELDS = ("quantity", "n_or_b", "rho", "sigma2", "entropy_nats")


@dataclass
class ExperimentConfig:
    code: dict = field(default_factory=lambda: {"kind": "rlc", "n": 128, "k": 116, "seed": 1})
    rho: list = field(default_factory=lambda: [0.5])
    ebno_db: list = field(default_factory=lambda: [3.7])
    b: list = field(default_factory=lambda: [4])
    tau: int = DEFAULT_TAU
    max_trials: int = 10**7
    min_errors: int = 100
    base_seed: int = 0
    batch_size: int = 1000
    workers: int = 1
    k_grid: list | None = None
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("rho", "ebno_db", "b"):
            value = getattr(self, name)
            if not isinstance(value, (list, tuple)):
                value = [value]
            if not value:
                raise ValueError(f"{name} list is empty")
            setattr(self, name, list(value))
        self.rho = [float(r) for r in self.rho]
        self.ebno_db = [float(e) for e in self.ebno_db]
        self.b = [int(b) for b in self.b]
        for r in self.rho:
            if not 0.0 <= r <= MAX_RHO:
                raise ValueError(f"rho must lie in [0, {MAX_RHO}], got {r}")
        for e in self.ebno_db:
            if not math.isfinite(e):
                raise ValueError(f"Eb/N0 must be finite, got {e}")
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_trials < self.min_errors:
            raise ValueError("max_trials must be >= min_errors")
        if self.tau < 1 or self.batch_size < 1 or self.workers < 1:
            raise ValueError("tau, batch_size and workers must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.format!r}")
        code = self.build_code()
        for b in self.b:
            if b < 1 or code.n % b:
                raise ValueError(f"block size {b} does not divide n = {code.n}")
        if self.k_grid is not None:
            self.k_grid = sorted({int(k) for k in self.k_grid})
            if not all(0 < k < code.n for k in self.k_grid):
                raise ValueError(f"k_grid entries must lie in (0, {code.n})")

    def build_code(self, k: int | None = None) -> LinearCode:
        cfg = dict(self.code)
        if k is not None:
            cfg["k"] = k
            if cfg.get("kind") == "crc" and "polynomial" in cfg:
                raise ValueError("rate search over CRC codes needs one polynomial per k")
        return code_from_config(cfg)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return ExperimentConfig.from_dict(data)


@dataclass(frozen=True)
class BlerPoint:
    rho: float
    ebno_db: float
    b: int
    n: int
    k: int
    rate: float
    trials: int
    errors: int
    bler: float
    mean_guesses: float
    abandon_rate: float

    @property
    def std_error(self) -> float:
        p = self.bler
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else math.inf


def cell_key(code_cfg: dict, rho: float, ebno_db: float, b: int) -> int:
    """64-bit key of a cell: blake2b over canonical JSON of its parameters."""
    blob = json.dumps({"code": code_cfg, "rho": rho, "ebno_db": ebno_db, "b": b}, sort_keys=True)
    return int.from_bytes(hashlib.blake2b(blob.encode(), digest_size=8).digest(), "little")


def batch_rng(base_seed: int, key: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([base_seed & (2**64 - 1), key, index]))


@lru_cache(maxsize=16)
def _cell_decoder(code_json: str, rho: float, ebno_db: float, b: int, tau: int):
    code = code_from_config(json.loads(code_json))
    channel = GaussMarkovChannel.from_ebno(rho, ebno_db, code.rate)
    dec = OrbgrandAIDecoder(code, rho=rho, sigma2=channel.sigma2, block_size=b, tau=tau).fit()
    return code, channel, dec


def simulate_batch(code: LinearCode, channel: GaussMarkovChannel, decoder, rng, size: int):
    """One batch of transmissions. Returns per-trial ``(error, guesses, found)``.

    Draw order: info words, then noise. An abandoned decode is an error.
    """
    u = rng.integers(0, 2, size=(size, code.k), dtype=np.uint8)
    c = encode(code, u)
    y = transmit(modulate_bpsk(c), channel, rng)
    bits, guesses, found = decoder.decode_batch(y)
    error = ~found | np.any(bits != c, axis=1)
    return error, guesses, found


def _run_batch(args):
    code_json, rho, ebno_db, b, tau, base_seed, key, index, size = args
    code, channel, dec = _cell_decoder(code_json, rho, ebno_db, b, tau)
    return simulate_batch(code, channel, dec, batch_rng(base_seed, key, index), size)


def run_cell(
    config: ExperimentConfig,
    rho: float,
    ebno_db: float,
    b: int,
    code: LinearCode | None = None,
    stop: Callable[[int, int], bool] | None = None,
    pool: ProcessPoolExecutor | None = None,
) -> BlerPoint:
    """Simulate one cell until ``min_errors`` errors or ``max_trials`` trials.

    ``stop(errors, trials)`` is an optional extra rule checked after each
    committed batch.
    """
    code = code or config.build_code()
    code_json = json.dumps(code.to_config(), sort_keys=True)
    key = cell_key(code.to_config(), rho, ebno_db, b)
    trials = errors = abandoned = 0
    guess_sum = 0
    index = 0
    wave = config.workers if pool is not None else 1
    done = False
    while not done and trials < config.max_trials:
        jobs = []
        planned = trials
        for _ in range(wave):
            size = min(config.batch_size, config.max_trials - planned)
            if size <= 0:
                break
            jobs.append((code_json, rho, ebno_db, b, config.tau, config.base_seed, key, index, size))
            planned += size
            index += 1
        results = pool.map(_run_batch, jobs) if pool is not None else map(_run_batch, jobs)
        for err, guesses, found in results:
            if done:
                continue
            cum = errors + np.cumsum(err)
            hit = np.flatnonzero(cum >= config.min_errors)
            take = int(hit[0]) + 1 if hit.size else len(err)
            trials += take
            errors += int(err[:take].sum())
            abandoned += int((~found[:take]).sum())
            guess_sum += int(guesses[:take].sum())
            if hit.size or (stop is not None and stop(errors, trials)):
                done = True
    point = BlerPoint(
        rho=rho,
        ebno_db=ebno_db,
        b=b,
        n=code.n,
        k=code.k,
        rate=code.rate,
        trials=trials,
        errors=errors,
        bler=errors / trials,
        mean_guesses=guess_sum / trials,
        abandon_rate=abandoned / trials,
    )
    log.info("cell rho=%g ebno=%g b=%d k=%d: %d/%d errors", rho, ebno_db, b, code.k, errors, trials)
    return point


def _pool(config: ExperimentConfig):
    return ProcessPoolExecutor(config.workers) if config.workers > 1 else None


def run_bler(config: ExperimentConfig) -> list[BlerPoint]:
    """All (rho, Eb/N0, b) cells of a config, in sorted order."""
    code = config.build_code()
    pool = _pool(config)
    try:
        points = [
            run_cell(config, rho, ebno, b, code=code, pool=pool)
            for rho in config.rho
            for ebno in config.ebno_db
            for b in config.b
        ]
    finally:
        if pool is not None:
            pool.shutdown()
    return sort_points(points)


def clopper_pearson_upper(errors: int, trials: int, confidence: float = 0.95) -> float:
    """One-sided exact binomial upper confidence bound."""
    if trials == 0 or errors >= trials:
        return 1.0
    return float(stats.beta.ppf(confidence, errors + 1, trials - errors))


def clopper_pearson_lower(errors: int, trials: int, confidence: float = 0.95) -> float:
    if errors == 0:
        return 0.0
    return float(stats.beta.ppf(1 - confidence, errors, trials - errors + 1))


@dataclass
class RateSearchResult:
    rho: float
    b: int
    target_bler: float
    target_ebno_db: float
    best_rate: float | None
    best_k: int | None
    points: list = field(default_factory=list)


def rate_search(
    config: ExperimentConfig,
    target_bler: float = 1e-3,
    target_ebno_db: float = 3.7,
    k_grid: Iterable[int] | None = None,
    confidence: float = 0.95,
) -> list[RateSearchResult]:
    """Highest rate on the k grid whose BLER upper confidence bound at
    ``target_ebno_db`` is at most ``target_bler``, per (rho, b).

    Rates are scanned from the top; a rate is dropped early once its lower
    confidence bound exceeds the target. ``best_rate`` is None when no grid
    rate qualifies.
    """
    if not 0 < target_bler <= 1:
        raise ValueError("target_bler must lie in (0, 1]")
    grid = sorted(set(k_grid or config.k_grid or [config.code["k"]]), reverse=True)
    n = config.build_code().n
    results = []
    pool = _pool(config)
    try:
        for rho in config.rho:
            for b in config.b:
                res = RateSearchResult(rho, b, target_bler, target_ebno_db, None, None)
                if target_bler >= 1:
                    res.best_k, res.best_rate = grid[0], grid[0] / n
                    results.append(res)
                    continue
                for k in grid:
                    code = config.build_code(k)

                    def hopeless(errors, trials):
                        return clopper_pearson_lower(errors, trials, confidence) > target_bler

                    point = run_cell(config, rho, target_ebno_db, b, code=code, stop=hopeless, pool=pool)
                    res.points.append(point)
                    if clopper_pearson_upper(point.errors, point.trials, confidence) <= target_bler:
                        res.best_k, res.best_rate = k, k / n
                        break
                results.append(res)
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def sort_points(points: Iterable[BlerPoint]) -> list[BlerPoint]:
    return sorted(points, key=lambda p: (p.rho, p.ebno_db, p.b, p.rate))


def emit_results(points: Iterable[BlerPoint], fmt: str = "csv", path=None) -> str:
    """Write points as CSV or JSON (sorted by rho, Eb/N0, b, rate).

    Returns the text; writes it to ``path`` when given. Floats use
    shortest round-trip ``repr``.
    """
    points = sort_points(points)
    if not points:
        raise ValueError("no results to emit")
    records = [{f: getattr(p, f) for f in CSV_FIELDS} for p in points]
    if fmt == "csv":
        lines = [",".join(CSV_FIELDS)]
        lines += [",".join(repr(r[f]) for f in CSV_FIELDS) for r in records]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps(records, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        _write(path, text)
    return text


def _write(path, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_results(path) -> list[BlerPoint]:
    """Parse a CSV or JSON file written by :func:`emit_results`."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("["):
        records = json.loads(text)
    else:
        records = list(csv.DictReader(text.splitlines()))
    types = {f.name: f.type for f in dataclasses.fields(BlerPoint)}
    cast = {"float": float, "int": int}
    return [BlerPoint(**{f: cast[types[f]](r[f]) for f in CSV_FIELDS}) for r in records]


def entropy_table(rhos, ns=(), bs=(), sigma2: float = 1.0) -> list[dict]:
    """Gauss-Markov entropy rates (nats per real component) for full-length
    ``n`` and block-independent ``b``."""
    rows = []
    for rho in rhos:
        channel = GaussMarkovChannel(rho, sigma2)
        rows += [dict(quantity="n", n_or_b=int(n), rho=float(rho), sigma2=float(sigma2),
                      entropy_nats=entropy_rate(int(n), channel)) for n in ns]
        rows += [dict(quantity="b", n_or_b=int(b), rho=float(rho), sigma2=float(sigma2),
                      entropy_nats=block_entropy_rate(int(b), channel)) for b in bs]
    return rows


def emit_entropy(rows, path=None) -> str:
    lines = [",".join(ENTROPY_FIELDS)]
    lines += [",".join(str(r[f]) if f == "quantity" else repr(r[f]) for f in ENTROPY_FIELDS) for r in rows]
    text = "\n".join(lines) + "\n"
    if path is not None:
        _write(path, text)
    return text
