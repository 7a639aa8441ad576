"""
Noise folding
=============

Noise added to the signal before measurement is mixed by ``A``. The
effective noise ``w + A z`` has covariance ``sigma^2 I + sigma0^2 A A^T``,
roughly ``gamma I`` with ``gamma = sigma^2 + (p/n) sigma0^2``. The SNR loss
``gamma / sigma^2`` grows linearly with ``p/n``.
"""

import numpy as np

from noisefold.analysis import estimate_noise_covariance
from noisefold.ensembles import gen_gaussian
from noisefold.model import NoiseSpec, effective_noise_covariance, gen_sparse_signal, measure_prenoise
from noisefold.whitening import folding_gamma

n, p = 16, 1024
A = gen_gaussian(n, p, 3)
noise = NoiseSpec(1.0, 1.0)

x = gen_sparse_signal(p, 3, 5.0, 9)
draw = measure_prenoise(A, x, noise, 9)
print("y - A x equals w + A z:", np.allclose(draw.y - A @ x.to_dense(), draw.w + A @ draw.z))

Q = effective_noise_covariance(A, noise)
Qhat = estimate_noise_covariance(A, noise, 50_000, 1)
print("Monte Carlo covariance error:", np.linalg.norm(Qhat - Q) / np.linalg.norm(Q))
print("mean diagonal of Q:", np.mean(np.diag(Q)))

# the degradation factor for a few undersampling ratios
for ratio in (2, 8, 32, 128):
    f = folding_gamma(1.0, 1.0, 64, 64 * ratio)
    print(f"p/n = {ratio:4d}: gamma/sigma^2 = {f.degradation:.0f}")
