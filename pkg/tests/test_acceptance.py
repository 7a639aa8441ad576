"""Acceptance criteria 1-9.

Each test prints one ``CRITERION k: PASS|FAIL`` line (visible with ``-s``)
and the lines are repeated in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from noisefold.analysis import covariance_target, estimate_noise_covariance, verify_prop1, verify_prop2
from noisefold.ensembles import EnsembleSpec
from noisefold.harness import (
    ExperimentConfig,
    csv_text,
    median_error,
    run_equivalent_standard,
    run_folding_sweep,
)
from noisefold.linalg import spectral_norm, sym_eigen
from noisefold.model import NoiseSpec, effective_noise_covariance
from noisefold.rng import derive_seed
from noisefold.whitening import compute_eta, eta1, eta2, eta3, eta_gaussian_bound, folding_gamma, whiten

SEEDS = range(1, 21)
UNIT_NOISE = NoiseSpec(1.0, 1.0)

SWEEP = ExperimentConfig(
    family="gaussian",
    n=64,
    p=1024,
    s=4,
    amplitude=1.0,
    sigma=0.05,
    sigma0=0.05,
    trials=200,
    algorithm="omp",
    master_seed=2024,
)


def report(k, ok, detail):
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def gaussian_instances():
    return {seed: EnsembleSpec("gaussian", 16, 1024, seed).generate() for seed in SEEDS}


def test_criterion_1_orthobasis_equivalence():
    t0 = time.perf_counter()
    A = EnsembleSpec("concat-orthobases", 64, 256, 11).generate()
    sigma, sigma0 = 0.3, 0.7
    gram_err = spectral_norm(A @ A.T - 4.0 * np.eye(64))
    eta = compute_eta(A)
    B = whiten(A, NoiseSpec(sigma, sigma0)).B
    b_err = float(np.max(np.abs(B - A)))
    gamma = folding_gamma(sigma, sigma0, 64, 256).gamma
    elapsed = time.perf_counter() - t0
    ok = (
        gram_err <= 1e-10
        and eta <= 1e-10
        and b_err <= 1e-8
        and gamma == sigma**2 + 4 * sigma0**2
        and elapsed < 1.0
    )
    report(1, ok, f"|AA^T-4I|={gram_err:.2e} eta={eta:.2e} |B-A|max={b_err:.2e} gamma={gamma!r} t={elapsed:.2f}s")


def test_criterion_2_rip_sandwich(gaussian_instances):
    t0 = time.perf_counter()
    verdicts = [verify_prop1(A, UNIT_NOISE, 2) for A in gaussian_instances.values()]
    elapsed = time.perf_counter() - t0
    in_hyp = [v for v in verdicts if v.hypothesis_met]
    held = [v for v in in_hyp if v.holds and v.details["sandwich_checked"]]
    subsets = {v.details.get("subsets_examined") for v in in_hyp}
    worst = max(v.eta for v in verdicts)
    ok = len(in_hyp) == 20 and len(held) == len(in_hyp) and elapsed < 300
    report(
        2,
        ok,
        f"{len(held)}/{len(in_hyp)} hold, {len(in_hyp)}/20 with eta<1/2 (max eta {worst:.3f}), "
        f"subsets={subsets} t={elapsed:.1f}s",
    )


def test_criterion_3_coherence(gaussian_instances):
    t0 = time.perf_counter()
    verdicts = [verify_prop2(A, UNIT_NOISE) for A in gaussian_instances.values()]
    elapsed = time.perf_counter() - t0
    in_hyp = [v for v in verdicts if v.hypothesis_met]
    held = [v for v in in_hyp if v.holds]
    tight = min(v.margin / v.bound_rhs for v in in_hyp)
    ok = len(in_hyp) == 20 and len(held) == 20
    report(3, ok, f"{len(held)}/{len(in_hyp)} hold, min relative margin {tight:.3f} t={elapsed:.1f}s")


def test_criterion_4_whitened_covariance(gaussian_instances):
    t0 = time.perf_counter()
    A = gaussian_instances[1]
    N = 100_000
    raw = estimate_noise_covariance(A, UNIT_NOISE, N, 404)
    Q = effective_noise_covariance(A, UNIT_NOISE)
    rel_raw = np.linalg.norm(raw - Q) / np.linalg.norm(Q)
    white = estimate_noise_covariance(A, UNIT_NOISE, N, 404, whitened=True)
    gamma = folding_gamma(1.0, 1.0, 16, 1024).gamma
    target = covariance_target(A, UNIT_NOISE, whitened=True)
    rel_white = np.linalg.norm(white - target) / (gamma * math.sqrt(16))
    elapsed = time.perf_counter() - t0
    ok = rel_raw <= 0.05 and rel_white <= 0.05 and elapsed < 30
    report(4, ok, f"raw={rel_raw:.4f} whitened={rel_white:.4f} (limit 0.05) t={elapsed:.1f}s")


def test_criterion_5_eta_concentration():
    t0 = time.perf_counter()
    base = EnsembleSpec("gaussian", 64, 4096, 505)
    bound = eta_gaussian_bound(64, 4096, 3.0)
    etas = np.array([compute_eta(base.stream(i).generate()) for i in range(200)])
    frac = float(np.mean(etas <= bound))
    elapsed = time.perf_counter() - t0
    ok = frac >= 0.90 and elapsed < 60
    report(
        5,
        ok,
        f"fraction within bound {frac:.3f} (>= 0.90), bound={bound:.4f} "
        f"eta range [{etas.min():.4f}, {etas.max():.4f}] t={elapsed:.1f}s",
    )


@pytest.fixture(scope="module")
def sweep_records():
    t0 = time.perf_counter()
    recs = run_folding_sweep(SWEEP, workers=1)
    return recs, time.perf_counter() - t0


def test_criterion_6_folding_factor(sweep_records):
    recs, sweep_time = sweep_records
    t0 = time.perf_counter()
    control = median_error(run_equivalent_standard(SWEEP), "standard")
    elapsed = sweep_time + time.perf_counter() - t0
    std = median_error(recs, "standard")
    white = median_error(recs, "prenoise-whitened")
    ratio = white / std
    rel = abs(white - control) / control
    ok = ratio >= 5 and rel <= 0.30 and elapsed < 60
    report(
        6,
        ok,
        f"median whitened/standard={ratio:.1f} (>= 5), vs control {rel:.3f} (<= 0.30) "
        f"[{std:.4g}, {white:.4g}, {control:.4g}] t={elapsed:.1f}s",
    )


def _proof_instances(count):
    families = ("gaussian", "bernoulli", "sphere-columns")
    i = 0
    while count:
        seed = derive_seed(707, i)
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 33))
        p = n * int(rng.integers(8, 65))
        A = EnsembleSpec(families[i % 3], n, p, seed).generate()
        noise = NoiseSpec(float(rng.uniform(0.05, 2.0)), float(rng.uniform(0.05, 2.0)))
        i += 1
        if compute_eta(A) < 1:
            count -= 1
            yield A, noise


def test_criterion_7_proof_quantities():
    failures = 0
    worst = -math.inf
    for A, noise in _proof_instances(50):
        sys = whiten(A, noise)
        eta = sys.eta
        n = A.shape[0]
        eig = sym_eigen(sys.Q1)
        lam, V = eig.eigenvalues, eig.eigenvectors
        lhs = (
            spectral_norm(sys.Q1 - np.eye(n)),
            spectral_norm((V / lam) @ V.T - np.eye(n)),
            spectral_norm((V / np.sqrt(lam)) @ V.T - np.eye(n)),
        )
        rhs = (eta, eta1(eta), eta3(eta))
        for a, b in zip(lhs, rhs):
            worst = max(worst, a - b)
            failures += not a <= b + 1e-10
    report(7, failures == 0, f"{150 - failures}/150 bounds hold on 50 instances, max excess {worst:.2e}")


def test_criterion_8_eta2_expansion():
    grid = [k / 100 for k in range(1, 21)]
    excess = max(abs(eta2(e) - 2 * e) - 6 * e**2 for e in grid)
    pin = eta2(0.4)
    ok = excess <= 0 and abs(pin - 2.3155028) <= 1e-6 and pin > 5 * 0.4
    report(8, ok, f"max(|eta2-2eta|-6eta^2)={excess:.3e}, eta2(0.4)={pin:.7f} > 2.0")


def test_criterion_9_determinism(sweep_records):
    recs, _ = sweep_records
    single = csv_text(recs)
    again = csv_text(run_folding_sweep(SWEEP, workers=1))
    multi = csv_text(run_folding_sweep(SWEEP, workers=4))
    ok = single == multi == again
    report(9, ok, f"{len(single)} bytes, single == multi: {single == multi}")
