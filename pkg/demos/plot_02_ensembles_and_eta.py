"""
Random ensembles and the distance eta
=====================================

``eta = |I - (n/p) A A^T|`` measures how far the rows of ``A`` are from a
tight frame. A concatenation of orthonormal bases has ``eta = 0``; Gaussian
matrices concentrate below ``2 sqrt(n/p) + n/p + 4 t / sqrt(p)``.
"""

import numpy as np

from noisefold.ensembles import EnsembleSpec
from noisefold.whitening import compute_eta, eta_gaussian_bound

for family in ("gaussian", "bernoulli", "sphere-columns"):
    A = EnsembleSpec(family, 32, 1024, 1).generate()
    print(f"{family:<16} eta = {compute_eta(A):.4f}")

A = EnsembleSpec("concat-orthobases", 32, 128, 1).generate()
print(f"{'concat-orthobases':<16} eta = {compute_eta(A):.2e}")

# eta shrinks as p/n grows, tracking the Gaussian bound
n, t = 32, 3.0
for p in (256, 1024, 4096):
    base = EnsembleSpec("gaussian", n, p, 7)
    etas = [compute_eta(base.stream(i).generate()) for i in range(20)]
    print(f"p = {p:5d}: median eta {np.median(etas):.4f}, bound at t=3 {eta_gaussian_bound(n, p, t):.4f}")
