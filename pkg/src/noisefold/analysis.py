"""Brute-force certificates: RIP constants, coherence, and the two whitening bounds.

RIP constants are computed by visiting every size-``s`` column subset in
lexicographic order and diagonalising its ``s x s`` Gram matrix. The subsets
are cut into fixed-size chunks that can be handed to a thread pool; results
are concatenated in chunk order so the output does not depend on the worker
count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, islice

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .linalg import as_matrix, sym_eigvals_stack
from .model import W_STREAM, Z_STREAM, effective_noise_covariance
from .rng import RandomStream, derive_seed
from .tolerances import TOL
from .whitening import compute_eta, eta1, eta2, folding_gamma, whiten

CHUNK = 1 << 16


@dataclass(frozen=True)
class RipReport:
    s: int
    alpha: float
    beta: float
    argmin_subset: tuple
    argmax_subset: tuple
    subsets_examined: int

    def as_dict(self):
        return {
            "s": self.s,
            "alpha": self.alpha,
            "beta": self.beta,
            "argmin_subset": " ".join(map(str, self.argmin_subset)),
            "argmax_subset": " ".join(map(str, self.argmax_subset)),
            "subsets_examined": self.subsets_examined,
        }

    def to_text(self):
        return _key_value_block(self.as_dict())


@dataclass(frozen=True)
class PropositionVerdict:
    """Outcome of checking one whitening bound on one matrix.

    ``bound_lhs <= bound_rhs`` is the tightest inequality that was checked
    (largest relative excess). ``holds`` is ``None`` when the hypothesis on
    eta is not met and nothing was checked.
    """

    name: str
    eta: float
    hypothesis_met: bool
    bound_lhs: float
    bound_rhs: float
    holds: bool | None
    margin: float
    details: dict = field(default_factory=dict)

    @property
    def status(self):
        if not self.hypothesis_met:
            return "out of hypothesis"
        return "holds" if self.holds else "FAILS"

    def as_dict(self):
        out = {
            "name": self.name,
            "eta": self.eta,
            "hypothesis_met": self.hypothesis_met,
            "bound_lhs": self.bound_lhs,
            "bound_rhs": self.bound_rhs,
            "holds": self.holds,
            "margin": self.margin,
            "status": self.status,
        }
        out.update(self.details)
        return out

    def to_text(self):
        return _key_value_block(self.as_dict())


def _fmt(value):
    if isinstance(value, bool) or value is None:
        return {True: "true", False: "false", None: "none"}[value]
    if isinstance(value, float):
        return f"{value:.16e}"
    return str(value)


def _key_value_block(d):
    return "".join(f"{k}={_fmt(v)}\n" for k, v in d.items())


CSV_COLUMNS = ("name", "eta", "hypothesis_met", "bound_lhs", "bound_rhs", "holds", "margin")


def verdict_csv_row(verdict):
    return ",".join(_fmt(getattr(verdict, col)) for col in CSV_COLUMNS)


def _subset_chunks(p, s):
    it = combinations(range(p), s)
    while True:
        block = list(islice(it, CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp).reshape(len(block), s)


def _chunk_extremes(G, idx):
    sub = G[idx[:, :, None], idx[:, None, :]]
    w = sym_eigvals_stack(sub)
    return w[:, -1], w[:, 0]


def subset_spectra(A, s, subset_cap=TOL.subset_cap, workers=1):
    """Smallest and largest eigenvalue of ``A_L^T A_L`` for every size-s subset L.

    Arrays are indexed by the lexicographic rank of L.
    """
    A = as_matrix(A, "A")
    n, p = A.shape
    s = int(s)
    if not 1 <= s <= min(n, p):
        raise PreconditionError(f"need 1 <= s <= min(n, p) = {min(n, p)}, got s={s}")
    total = math.comb(p, s)
    if total > subset_cap:
        raise PreconditionError(
            f"C({p}, {s}) = {total} subsets exceeds the cap of {subset_cap}"
        )
    G = A.T @ A
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda idx: _chunk_extremes(G, idx), _subset_chunks(p, s)))
    else:
        parts = [_chunk_extremes(G, idx) for idx in _subset_chunks(p, s)]
    lo = np.concatenate([pt[0] for pt in parts])
    hi = np.concatenate([pt[1] for pt in parts])
    scale = max(1.0, float(np.max(np.abs(hi))))
    if np.any(lo < -TOL.eig_clamp * scale):
        raise ConvergenceError("Gram eigenvalue clearly negative")
    return np.maximum(lo, 0.0), hi


def unrank_combination(rank, p, s):
    """The size-s subset of range(p) at position ``rank`` in lexicographic order."""
    rank = int(rank)
    out = []
    start = 0
    for k in range(s, 0, -1):
        for c in range(start, p):
            count = math.comb(p - c - 1, k - 1)
            if rank < count:
                out.append(c)
                start = c + 1
                break
            rank -= count
    return tuple(out)


def rip_constants(A, s, subset_cap=TOL.subset_cap, workers=1):
    """Exhaustive RIP constants of order ``s``.

    ``alpha`` and ``beta`` are the extreme eigenvalues of ``A_L^T A_L`` over
    all subsets ``L`` of size ``s``; ties go to the lexicographically first
    subset. Raises ``PreconditionError`` if ``C(p, s)`` exceeds ``subset_cap``.
    """
    lo, hi = subset_spectra(A, s, subset_cap, workers)
    p = np.asarray(A).shape[1]
    i_min = int(np.argmin(lo))
    i_max = int(np.argmax(hi))
    return RipReport(
        s=int(s),
        alpha=float(lo[i_min]),
        beta=float(hi[i_max]),
        argmin_subset=unrank_combination(i_min, p, s),
        argmax_subset=unrank_combination(i_max, p, s),
        subsets_examined=int(lo.size),
    )


def coherence(A):
    """Largest ``|<A_i, A_j>| / (||A_i|| ||A_j||)`` over distinct columns."""
    A = as_matrix(A, "A")
    if A.shape[1] < 2:
        raise PreconditionError("coherence needs at least two columns")
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms <= TOL.zero_column):
        raise PreconditionError("matrix has a zero column")
    U = A / norms
    C = np.abs(U.T @ U)
    np.fill_diagonal(C, 0.0)
    return float(min(C.max(), 1.0))


def _excess(lhs, rhs):
    """Relative amount by which ``lhs <= rhs`` is violated (negative when it holds)."""
    lhs = np.asarray(lhs, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    denom = np.where(rhs != 0.0, np.abs(rhs), 1e-300)
    return (lhs - rhs) / denom


def _holds(lhs, rhs):
    return bool(lhs <= rhs + TOL.theorem_slack * abs(rhs))


def _verdict_from_checks(name, eta, checks, details):
    """Report the inequality with the largest relative excess."""
    worst = None
    for label, lhs, rhs in checks:
        ex = _excess(lhs, rhs)
        k = int(np.argmax(ex)) if np.ndim(ex) else 0
        e = float(np.ravel(ex)[k])
        if worst is None or e > worst[0]:
            worst = (e, label, float(np.ravel(lhs)[k]), float(np.ravel(rhs)[k]), k)
    _, label, lhs, rhs, k = worst
    details = dict(details, tightest=label)
    if label.startswith("subset"):
        details["tightest_subset_rank"] = k
    return PropositionVerdict(
        name=name,
        eta=eta,
        hypothesis_met=True,
        bound_lhs=lhs,
        bound_rhs=rhs,
        holds=_holds(lhs, rhs),
        margin=rhs - lhs,
        details=details,
    )


def _out_of_hypothesis(name, eta):
    nan = float("nan")
    return PropositionVerdict(name, eta, False, nan, nan, None, nan)


def verify_prop1(A, noise, s, subset_cap=TOL.subset_cap, sandwich=None, workers=1):
    """Check that whitening keeps RIP constants within ``(1 -/+ eta1)``.

    With ``eta < 1/2``, ``B = W A`` must satisfy
    ``alpha_s(B) >= (1 - eta1) alpha_s(A)`` and
    ``beta_s(B) <= (1 + eta1) beta_s(A)``. With ``sandwich`` on (the default
    when ``C(p, s) <= 10**6``) the same two inequalities are also checked
    subset by subset on the extreme eigenvalues of the Gram matrices.
    """
    A = as_matrix(A, "A")
    eta = compute_eta(A)
    if eta >= TOL.prop1_eta:
        return _out_of_hypothesis("prop1", eta)
    e1 = eta1(eta)
    B = whiten(A, noise).B
    lo_a, hi_a = subset_spectra(A, s, subset_cap, workers)
    lo_b, hi_b = subset_spectra(B, s, subset_cap, workers)
    alpha_a, beta_a = float(lo_a.min()), float(hi_a.max())
    alpha_b, beta_b = float(lo_b.min()), float(hi_b.max())
    checks = [
        ("alpha", (1.0 - e1) * alpha_a, alpha_b),
        ("beta", beta_b, (1.0 + e1) * beta_a),
    ]
    if sandwich is None:
        sandwich = lo_a.size <= TOL.sandwich_default_max
    if sandwich:
        checks.append(("subset_lower", (1.0 - e1) * lo_a, lo_b))
        checks.append(("subset_upper", hi_b, (1.0 + e1) * hi_a))
    details = {
        "s": int(s),
        "eta1": e1,
        "alpha_A": alpha_a,
        "beta_A": beta_a,
        "alpha_B": alpha_b,
        "beta_B": beta_b,
        "subsets_examined": int(lo_a.size),
        "sandwich_checked": bool(sandwich),
    }
    return _verdict_from_checks("prop1", eta, checks, details)


def verify_prop2(A, noise):
    """Check ``mu(B) <= (1 + eta2) mu(A)`` when ``eta < 3/4``."""
    A = as_matrix(A, "A")
    eta = compute_eta(A)
    if eta >= TOL.prop2_eta:
        return _out_of_hypothesis("prop2", eta)
    e2 = eta2(eta)
    mu_a = coherence(A)
    mu_b = coherence(whiten(A, noise).B)
    details = {"eta2": e2, "mu_A": mu_a, "mu_B": mu_b}
    return _verdict_from_checks("prop2", eta, [("coherence", mu_b, (1.0 + e2) * mu_a)], details)


def estimate_noise_covariance(A, noise, N, seed, whitened=False, chunk=4096):
    """Sample covariance of ``N`` draws of ``v = w + A z`` (or ``u = W v``).

    Mean-removed, divisor ``N - 1``. ``w`` and ``z`` come from sub-streams 1
    and 2 of ``seed``, generated in blocks of ``chunk`` draws.
    """
    A = as_matrix(A, "A")
    N = int(N)
    if N < 2:
        raise PreconditionError("need at least two draws")
    n, p = A.shape
    W = whiten(A, noise).W if whitened else None
    w_stream = RandomStream(derive_seed(seed, W_STREAM))
    z_stream = RandomStream(derive_seed(seed, Z_STREAM))
    total = np.zeros(n)
    outer = np.zeros((n, n))
    done = 0
    while done < N:
        k = min(chunk, N - done)
        w = noise.sigma * w_stream.normal(n * k).reshape(n, k)
        z = noise.sigma0 * z_stream.normal(p * k).reshape(p, k)
        V = w + A @ z
        if W is not None:
            V = W @ V
        total += V.sum(axis=1)
        outer += V @ V.T
        done += k
    mean = total / N
    C = (outer - N * np.outer(mean, mean)) / (N - 1)
    return 0.5 * (C + C.T)


def covariance_target(A, noise, whitened=False):
    """Population covariance that ``estimate_noise_covariance`` converges to."""
    A = as_matrix(A, "A")
    if whitened:
        n, p = A.shape
        return folding_gamma(noise.sigma, noise.sigma0, n, p).gamma * np.eye(n)
    return effective_noise_covariance(A, noise)
