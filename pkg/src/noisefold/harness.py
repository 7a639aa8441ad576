"""Experiment configuration, the noise-folding Monte Carlo sweep, and the verification suite.

Seeding
-------
The measurement matrix is generated from ``master_seed`` itself. Trial ``t``
uses ``derive_seed(master_seed, t)``; its signal comes from sub-stream 0 of
that seed and its noise from sub-stream 1. All three models of one trial use
the same noise seed, so they share the same ``w`` and ``z``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .analysis import (
    covariance_target,
    estimate_noise_covariance,
    verify_prop1,
    verify_prop2,
)
from .ensembles import FAMILIES, EnsembleSpec
from .errors import ConfigError, PreconditionError
from .model import NoiseSpec, gen_sparse_signal, measure_prenoise, measure_standard
from .recovery import ALGORITHMS, squared_error
from .rng import MASK64, derive_seed
from .textio import format_float
from .tolerances import TOL
from .whitening import (
    apply_whitening,
    compute_eta,
    eta_gaussian_bound,
    folding_gamma,
    whiten,
)

MODELS = ("standard", "prenoise", "prenoise-whitened")
CSV_HEADER = ("trial", "model", "eta", "gamma", "squared_error", "support_recovered")

SIGNAL_STREAM = 0
NOISE_STREAM = 1


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    n: int
    p: int
    s: int
    amplitude: float
    sigma: float
    sigma0: float
    trials: int
    algorithm: str
    master_seed: int
    whiten: bool = True
    output_path: str | None = None
    subset_cap: int = TOL.subset_cap

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {', '.join(FAMILIES)}, got {self.family!r}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {', '.join(ALGORITHMS)}, got {self.algorithm!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 1 <= self.s <= min(self.n, self.p):
            raise ConfigError(f"s must satisfy 1 <= s <= min(n, p), got s={self.s}")
        for name in ("amplitude", "sigma", "sigma0"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.amplitude <= 0:
            raise ConfigError("amplitude must be positive")
        if self.sigma < 0 or self.sigma0 < 0:
            raise ConfigError("sigma and sigma0 must be non-negative")
        if self.sigma == 0 and self.sigma0 == 0:
            raise ConfigError("sigma and sigma0 cannot both be zero (gamma is undefined)")
        if not 0 <= self.master_seed <= MASK64:
            raise ConfigError("master_seed must fit in 64 unsigned bits")
        try:
            self.ensemble
        except PreconditionError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def ensemble(self):
        return EnsembleSpec(self.family, self.n, self.p, self.master_seed)

    @property
    def noise(self):
        return NoiseSpec(self.sigma, self.sigma0)


_REQUIRED = ("family", "n", "s", "amplitude", "sigma", "sigma0", "trials", "algorithm", "master_seed")
_KEYS = _REQUIRED + ("p", "r", "whiten", "output_path", "subset_cap")


def _parse_bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONVERT = {
    "family": str,
    "n": int,
    "p": int,
    "r": int,
    "s": int,
    "amplitude": float,
    "sigma": float,
    "sigma0": float,
    "trials": int,
    "algorithm": str,
    "whiten": _parse_bool,
    "master_seed": int,
    "output_path": str,
    "subset_cap": int,
}


def parse_config_text(text, source="<config>"):
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: empty key or value")
        if key not in _KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            raw[key] = _CONVERT[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc

    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"{source}: missing required key(s): {', '.join(missing)}")

    r = raw.pop("r", None)
    if r is not None:
        if raw["family"] != "concat-orthobases":
            raise ConfigError(f"{source}: key 'r' only applies to concat-orthobases")
        if "p" in raw and raw["p"] != r * raw["n"]:
            raise ConfigError(f"{source}: p = {raw['p']} disagrees with r * n = {r * raw['n']}")
        raw["p"] = r * raw["n"]
    if "p" not in raw:
        raise ConfigError(f"{source}: missing required key(s): p")
    return ExperimentConfig(**raw)


def parse_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def format_config(config):
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    eta: float
    gamma: float
    model: str
    squared_error: float
    support_recovered: bool


def _trial_seeds(master_seed, t):
    ts = derive_seed(master_seed, t)
    return derive_seed(ts, SIGNAL_STREAM), derive_seed(ts, NOISE_STREAM)


def _run_pool(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _support_matches(result, x):
    return set(result.support.tolist()) == set(x.support.tolist())


def run_folding_sweep(config, workers=1):
    """Paired Monte Carlo comparison of the measurement models.

    Per trial, the chosen algorithm recovers a fresh sparse signal from:
    ``standard`` (``y = A x + w``, decoded with ``A``), ``prenoise``
    (``y = A (x + z) + w``, decoded naively with ``A``) and, when
    ``config.whiten`` is set, ``prenoise-whitened`` (``W y`` decoded with
    ``B = W A``). Records are sorted by trial index, then by model.
    """
    A = config.ensemble.generate()
    noise = config.noise
    recover = ALGORITHMS[config.algorithm]
    eta = compute_eta(A)
    gamma = folding_gamma(config.sigma, config.sigma0, config.n, config.p).gamma
    system = whiten(A, noise) if config.whiten else None

    def one_trial(t):
        sig_seed, noise_seed = _trial_seeds(config.master_seed, t)
        x = gen_sparse_signal(config.p, config.s, config.amplitude, sig_seed)
        std = measure_standard(A, x, noise, noise_seed)
        pre = measure_prenoise(A, x, noise, noise_seed)
        runs = [("standard", A, std.y), ("prenoise", A, pre.y)]
        if system is not None:
            runs.append(("prenoise-whitened", system.B, apply_whitening(system, pre.y)))
        out = []
        for model, M, y in runs:
            res = recover(M, y, config.s)
            out.append(
                TrialRecord(t, eta, gamma, model, squared_error(res.xhat, x), _support_matches(res, x))
            )
        return out

    per_trial = _run_pool(one_trial, range(config.trials), workers)
    records = [rec for batch in per_trial for rec in batch]
    order = {m: i for i, m in enumerate(MODELS)}
    records.sort(key=lambda rec: (rec.trial_index, order[rec.model]))
    return records


def run_equivalent_standard(config, workers=1):
    """Control for the whitened model: ``y = B x + w'`` with ``w' ~ N(0, gamma I)``.

    Uses the same matrix, signals and noise seeds as :func:`run_folding_sweep`,
    so its errors are directly comparable with the ``prenoise-whitened`` rows.
    Records carry ``model = "standard"``.
    """
    A = config.ensemble.generate()
    system = whiten(A, config.noise)
    recover = ALGORITHMS[config.algorithm]
    control_noise = NoiseSpec(math.sqrt(system.gamma), 0.0)

    def one_trial(t):
        sig_seed, noise_seed = _trial_seeds(config.master_seed, t)
        x = gen_sparse_signal(config.p, config.s, config.amplitude, sig_seed)
        draw = measure_standard(system.B, x, control_noise, noise_seed)
        res = recover(system.B, draw.y, config.s)
        return TrialRecord(
            t, system.eta, system.gamma, "standard", squared_error(res.xhat, x), _support_matches(res, x)
        )

    return _run_pool(one_trial, range(config.trials), workers)


def median_error(records, model):
    errs = [r.squared_error for r in records if r.model == model]
    if not errs:
        raise ValueError(f"no records for model {model!r}")
    return float(np.median(errs))


def csv_text(records):
    lines = [",".join(CSV_HEADER)]
    for rec in records:
        lines.append(
            ",".join(
                (
                    str(rec.trial_index),
                    rec.model,
                    format_float(rec.eta),
                    format_float(rec.gamma),
                    format_float(rec.squared_error),
                    "1" if rec.support_recovered else "0",
                )
            )
        )
    return "\n".join(lines) + "\n"


def emit_csv(records, path):
    """Write records as CSV: fixed header, ``.`` decimals, 17 significant digits, LF endings."""
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(csv_text(records))


# verification suite


@dataclass
class SuiteEntry:
    label: str
    kind: str
    passed: bool | None
    theorem: bool
    detail: str


@dataclass
class SuiteReport:
    entries: list

    @property
    def theorem_failures(self):
        return [e for e in self.entries if e.theorem and e.passed is False]

    @property
    def exit_status(self):
        return 3 if self.theorem_failures else 0

    def to_text(self):
        lines = []
        for e in self.entries:
            mark = {True: "ok", False: "FAIL", None: "skip"}[e.passed]
            lines.append(f"[{mark:4}] {e.kind:<12} {e.label:<28} {e.detail}")
        lines.append(
            f"theorem failures: {len(self.theorem_failures)}; exit status {self.exit_status}"
        )
        return "\n".join(lines) + "\n"


def _verdict_entry(label, verdict):
    if not verdict.hypothesis_met:
        detail = f"eta={verdict.eta:.4f} out of hypothesis"
        return SuiteEntry(label, verdict.name, None, True, detail)
    detail = (
        f"eta={verdict.eta:.4f} lhs={verdict.bound_lhs:.6g} rhs={verdict.bound_rhs:.6g} "
        f"margin={verdict.margin:.3g} tightest={verdict.details.get('tightest')}"
    )
    return SuiteEntry(label, verdict.name, verdict.holds, True, detail)


def run_verification_suite(
    seeds=range(1, 21),
    n=16,
    p=1024,
    s=2,
    sigma=1.0,
    sigma0=1.0,
    family="gaussian",
    subset_cap=TOL.subset_cap,
    workers=1,
    covariance_draws=0,
    t=3.0,
):
    """Run the theorem checks over seeded instances.

    For each seed: both propositions, plus the Gaussian eta bound (a
    high-probability statement, reported but not counted as a theorem).
    Two fixed instances are appended: a concatenation of orthonormal bases
    (eta must vanish) and an ``n=8, p=10`` Gaussian matrix whose eta is
    out of hypothesis. ``covariance_draws > 0`` adds a Monte Carlo check of
    the raw and whitened noise covariance on the first seed.

    Returns ``(exit_status, SuiteReport)``; the status is 3 iff some check
    whose hypothesis was met failed.
    """
    noise = NoiseSpec(sigma, sigma0)
    entries = []
    seeds = list(seeds)

    def instance(seed):
        A = EnsembleSpec(family, n, p, seed).generate()
        v1 = verify_prop1(A, noise, s, subset_cap=subset_cap, workers=1)
        v2 = verify_prop2(A, noise)
        return seed, A, v1, v2

    results = _run_pool(instance, seeds, workers)
    for seed, A, v1, v2 in results:
        entries.append(_verdict_entry(f"{family} seed={seed}", v1))
        entries.append(_verdict_entry(f"{family} seed={seed}", v2))
        if family == "gaussian" and p >= n and 0 < t <= math.sqrt(n):
            bound = eta_gaussian_bound(n, p, t)
            eta = v1.eta
            entries.append(
                SuiteEntry(
                    f"{family} seed={seed}",
                    "eta-bound",
                    eta <= bound,
                    False,
                    f"eta={eta:.4f} bound(t={t:g})={bound:.4f}",
                )
            )

    if covariance_draws and seeds:
        A = EnsembleSpec(family, n, p, seeds[0]).generate()
        for whitened in (False, True):
            est = estimate_noise_covariance(A, noise, covariance_draws, seeds[0], whitened=whitened)
            target = covariance_target(A, noise, whitened=whitened)
            rel = float(np.linalg.norm(est - target) / np.linalg.norm(target))
            entries.append(
                SuiteEntry(
                    f"{family} seed={seeds[0]}",
                    "cov-white" if whitened else "cov-raw",
                    rel <= 0.05,
                    False,
                    f"relative Frobenius error {rel:.4f} (N={covariance_draws})",
                )
            )

    ortho = EnsembleSpec("concat-orthobases", 16, 64, 11).generate()
    eta_o = compute_eta(ortho)
    entries.append(
        SuiteEntry("concat-orthobases n=16 r=4", "eta", eta_o <= 1e-10, False, f"eta={eta_o:.3e}")
    )
    entries.append(_verdict_entry("concat-orthobases n=16 r=4", verify_prop2(ortho, noise)))

    small = EnsembleSpec("gaussian", 8, 10, 1).generate()
    entries.append(_verdict_entry("gaussian n=8 p=10", verify_prop2(small, noise)))
    entries.append(_verdict_entry("gaussian n=8 p=10", verify_prop1(small, noise, 2)))

    report = SuiteReport(entries)
    return report.exit_status, report
