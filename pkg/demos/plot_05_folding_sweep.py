"""
Recovery under folded noise
===========================

Paired Monte Carlo trials compare OMP under measurement noise alone, under
pre-measurement noise, and under pre-measurement noise after whitening.
A control run uses the whitened matrix with white noise of variance gamma.
"""

from noisefold.harness import ExperimentConfig, median_error, run_equivalent_standard, run_folding_sweep

config = ExperimentConfig(
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

records = run_folding_sweep(config, workers=4)
for model in ("standard", "prenoise", "prenoise-whitened"):
    recovered = sum(r.support_recovered for r in records if r.model == model) / config.trials
    print(f"{model:<18} median squared error {median_error(records, model):.4g}  support recovered {recovered:.0%}")

control = run_equivalent_standard(config)
print(f"{'control':<18} median squared error {median_error(control, 'standard'):.4g}")
print("predicted noise-power ratio gamma/sigma^2:", records[0].gamma / config.sigma**2)
