"""
Whitening and the bounds it preserves
=====================================

Multiplying by ``W = (Q / gamma)^(-1/2)`` turns the effective noise white.
The whitened matrix ``B = W A`` keeps the RIP constants of ``A`` within
a factor ``1 +- eta/(1-eta)`` and its coherence within ``1 + eta2``.
"""

import numpy as np

from noisefold.analysis import estimate_noise_covariance, rip_constants, verify_prop1, verify_prop2
from noisefold.ensembles import gen_gaussian
from noisefold.model import NoiseSpec
from noisefold.whitening import eta1, eta2, eta3, whiten

A = gen_gaussian(16, 1024, 4)
noise = NoiseSpec(1.0, 1.0)
sys = whiten(A, noise)
print(f"gamma = {sys.gamma}, eta = {sys.eta:.4f}")
print(f"eta1 = {eta1(sys.eta):.4f}, eta2 = {eta2(sys.eta):.4f}, eta3 = {eta3(sys.eta):.4f}")

# whitened noise is white
est = estimate_noise_covariance(A, noise, 50_000, 2, whitened=True)
print("whitened covariance / gamma, max deviation from I:", np.max(np.abs(est / sys.gamma - np.eye(16))))

# RIP constants of order 2, by exhaustive search over 523,776 pairs
ra, rb = rip_constants(A, 2), rip_constants(sys.B, 2)
print(f"A: alpha={ra.alpha:.4f} beta={ra.beta:.4f}")
print(f"B: alpha={rb.alpha:.4f} beta={rb.beta:.4f}")

for v in (verify_prop1(A, noise, 2), verify_prop2(A, noise)):
    print(f"{v.name}: {v.status}, lhs={v.bound_lhs:.4f} rhs={v.bound_rhs:.4f}")

# the small-eta expansion eta2 ~ 2 eta, and where 5 eta stops bounding it
for e in (0.05, 0.2, 0.36, 0.4):
    print(f"eta={e:.2f}: eta2={eta2(e):.4f}  5*eta={5 * e:.2f}")
