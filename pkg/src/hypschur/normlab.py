"""Numerical norm laboratory for finite kernel sections.

Floating-point and section-local, in contrast to the exact certificate
route: spectral norms, Schur-multiplier action, witness lower bounds, the
completely bounded multiplier norm via semidefinite feasibility bisection,
and positive-semidefiniteness checks.  The cb solver never reports a
silently wrong number: runs it cannot classify inside the iteration budget
come back flagged inconclusive, with the residual attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "spectral_norm", "schur_apply",
    "LowerBoundResult", "lower_bound",
    "CbNormResult", "cb_norm_sdp",
    "psd_min_eig",
    "SandwichReport", "SandwichError", "sandwich_report",
    "DIM_CAP",
]

DIM_CAP = 64


def _as_matrix(kernel) -> np.ndarray:
    a = np.asarray(getattr(kernel, "values", kernel))
    a = a.astype(np.complex128, copy=False)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return np.ascontiguousarray(a)


def spectral_norm(matrix, tol: float = 1e-10, max_iter: int = 100000) -> float:
    """Largest singular value.

    Full decomposition up to 64 rows/columns; past that, power iteration on
    the Gram matrix with deterministic restarts.  Raises ArithmeticError
    carrying the last residual if the iteration cap is hit.
    """
    a = _as_matrix(matrix)
    if a.size == 0:
        return 0.0
    if max(a.shape) <= DIM_CAP:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    b = a @ a.conj().T if a.shape[0] <= a.shape[1] else a.conj().T @ a
    n = b.shape[0]
    if not np.abs(b).max():
        return 0.0
    rng = np.random.default_rng(0)
    residual = math.inf
    budget = max(16, max_iter // 6)
    for _restart in range(6):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        for it in range(budget):
            w = b @ v
            lam = float(np.real(np.vdot(v, w)))
            nw = float(np.linalg.norm(w))
            if nw == 0.0:
                break  # started in the kernel; draw again
            if lam > 0.0 and (it & 7) == 7:
                # |lam - lam_true| <= ||b v - lam v|| for Hermitian b, and the
                # square root halves the relative error
                residual = float(np.linalg.norm(w - lam * v)) / lam
                if residual <= 2.0 * tol:
                    return math.sqrt(lam)
            v = w / nw
    raise ArithmeticError(
        f"power iteration did not converge (residual {residual:.3e})")


def schur_apply(kernel, a) -> np.ndarray:
    """Multiplier action: entrywise product of the section with a."""
    k = _as_matrix(kernel)
    a = _as_matrix(a)
    if k.shape != a.shape:
        raise ValueError(f"shape mismatch: kernel {k.shape} vs argument {a.shape}")
    return k * a


# -- witness lower bounds --------------------------------------------------------


_STRATEGIES = ("basis", "rank_one_signs", "random_gaussian")


@dataclass(frozen=True)
class LowerBoundResult:
    """A valid lower bound ||m_k(A)|| / ||A|| with its witness A stored."""

    value: float
    strategy: str
    witness: np.ndarray
    seed: int
    trials: int

    def verify(self, kernel, tol: float = 1e-12) -> bool:
        """Recompute the quotient from the stored witness and compare."""
        k = _as_matrix(kernel)
        denom = spectral_norm(self.witness)
        if denom == 0.0:
            return self.value == 0.0
        q = spectral_norm(schur_apply(k, self.witness)) / denom
        return abs(q - self.value) <= tol * max(1.0, abs(self.value))


def lower_bound(kernel, strategies=_STRATEGIES, seed: int = 0,
                trials: int = 20) -> LowerBoundResult:
    """Best witness quotient over the requested strategies.

    basis routes the largest entry through a matrix unit; rank_one_signs
    conjugates by sign diagonals (every sign choice yields ||K|| / dim);
    random_gaussian draws dense witnesses from the recorded seed.
    """
    k = _as_matrix(kernel)
    if k.shape[0] != k.shape[1]:
        raise ValueError("kernel section must be square")
    if not strategies:
        raise ValueError("at least one strategy is required")
    unknown = set(strategies) - set(_STRATEGIES)
    if unknown:
        raise ValueError(f"unknown strategies {sorted(unknown)}")
    n = k.shape[0]
    rng = np.random.default_rng(seed)
    best_value, best_witness, best_tag = -1.0, None, None

    def consider(value, witness, tag):
        nonlocal best_value, best_witness, best_tag
        if value > best_value:
            best_value, best_witness, best_tag = value, witness, tag

    for tag in strategies:
        if tag == "basis":
            i, j = np.unravel_index(int(np.argmax(np.abs(k))), k.shape)
            a = np.zeros_like(k)
            a[i, j] = 1.0
            consider(float(np.abs(k[i, j])), a, tag)
        elif tag == "rank_one_signs":
            s = rng.integers(0, 2, n) * 2 - 1
            t = rng.integers(0, 2, n) * 2 - 1
            a = np.outer(s, t).astype(np.complex128)
            consider(spectral_norm(k * a) / n, a, tag)
        else:
            for _ in range(trials):
                a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                consider(spectral_norm(k * a) / spectral_norm(a), a, tag)
    return LowerBoundResult(value=float(best_value), strategy=best_tag,
                            witness=best_witness, seed=seed, trials=trials)


# -- completely bounded norm -------------------------------------------------------


@dataclass(frozen=True)
class CbNormResult:
    """Completely bounded multiplier norm from feasibility bisection.

    bracket records the initial [max|k|, dim * max|k|] interval; residual is
    the affine-set defect of the last confirmed-feasible iterate (or, when
    inconclusive, of the run that could not be classified).
    """

    value: float
    tol: float
    iterations: int
    feasibility_residual: float
    method: str
    inconclusive: bool
    bracket: tuple[float, float]
    dim: int


def _feasible_at(k, t, x0, feas_tol, max_iter):
    """Alternate between the PSD cone and {off-block K, diagonal t}.

    Returns (state, x, residual, iterations, upper): state is True / False /
    None for feasible / infeasible / unclassified, and upper = t + |min eig|
    of the best affine iterate, which is always a rigorous feasibility level
    (pad the diagonal by the eigenvalue defect and the iterate turns PSD).

    Fixing the diagonal at exactly t loses no generality, since padding the
    diagonal preserves positivity; it keeps the affine set a subspace shift.
    Infeasibility is read off the residual plateau: the iterates stall at
    the distance between the two sets, detected by Aitken extrapolation of
    the residual tail.
    """
    n = k.shape[0]
    kh = k.conj().T
    x = x0
    res = math.inf
    upper = math.inf
    hist = []
    window = 25
    for it in range(1, max_iter + 1):
        y = x.copy()
        y[:n, n:] = k
        y[n:, :n] = kh
        np.fill_diagonal(y, t)
        w, v = np.linalg.eigh(y)
        upper = min(upper, t + max(0.0, float(-w[0])))
        np.maximum(w, 0.0, out=w)
        x = (v * w) @ v.conj().T
        x = (x + x.conj().T) * 0.5
        off = float(np.linalg.norm(x[:n, n:] - k))
        dia = float(np.linalg.norm(np.real(np.diagonal(x)) - t))
        res = math.hypot(off, dia)
        if res <= feas_tol:
            return True, x, res, it, upper
        if it % window == 0:
            hist.append(res)
            if (len(hist) >= 3 and res > 50.0 * feas_tol
                    and hist[-3] - hist[-1] <= 1e-3 * hist[-1]):
                # two stalled windows in a row: parked at the set-to-set gap
                return False, x, res, it, upper
    return None, x, res, max_iter, upper


def cb_norm_sdp(kernel, tol: float = 1e-7, dim_cap: int = DIM_CAP,
                max_iter: int = 3000) -> CbNormResult:
    """||m_k||_cb of a finite section by bisection over the feasibility
    threshold t: the norm is at most t exactly when some positive block
    matrix with off-diagonal block k has all diagonal entries at most t.

    Initial bracket [max|k|, dim * max|k|]: the left end is the matrix-unit
    lower bound, the right end is feasible via the trivial factorization.
    Conclusive runs satisfy residual <= tol; anything the projections could
    not classify is flagged inconclusive instead of being guessed.
    """
    k = _as_matrix(kernel)
    if k.shape[0] != k.shape[1]:
        raise ValueError("kernel section must be square")
    n = k.shape[0]
    if n > dim_cap:
        raise ValueError(f"section dimension {n} exceeds the solver cap {dim_cap}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    mx = float(np.abs(k).max()) if n else 0.0
    bracket = (mx, n * mx)
    if mx == 0.0:
        return CbNormResult(value=0.0, tol=tol, iterations=0,
                            feasibility_residual=0.0, method="bisect+altproj",
                            inconclusive=False, bracket=bracket, dim=n)
    feas_tol = min(1e-10, 0.01 * tol)
    pad = 1e-12 * (1.0 + n * mx)  # covers eigenvalue fp error in the lift
    t_lo, t_hi = bracket
    # start from the trivially feasible lift at the right end of the bracket
    x = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    x[:n, n:] = k
    x[n:, :n] = k.conj().T
    np.fill_diagonal(x, t_hi)
    iterations = 0
    residual = 0.0
    inconclusive = False
    while t_hi - t_lo > tol:
        width = t_hi - t_lo
        t = 0.5 * (t_lo + t_hi)
        state, x_new, res, its, upper = _feasible_at(k, t, x, feas_tol, max_iter)
        iterations += its
        t_hi = min(t_hi, upper + pad)  # rigorous regardless of classification
        if state is True:
            t_hi = min(t_hi, t)
            x = x_new
            residual = res
        elif state is False:
            t_lo = t
        else:
            inconclusive = True
            residual = max(residual, res)
        if t_lo > t_hi:
            # plateau heuristic contradicted by a rigorous lift; trust the lift
            t_lo = max(mx, t_hi - tol)
            inconclusive = True
        if t_hi - t_lo >= width - 1e-18:  # no progress either way; stop honestly
            inconclusive = True
            residual = max(residual, res)
            break
    return CbNormResult(value=0.5 * (t_lo + t_hi), tol=tol,
                        iterations=iterations, feasibility_residual=residual,
                        method="bisect+altproj", inconclusive=inconclusive,
                        bracket=bracket, dim=n)


def psd_min_eig(kernel, herm_tol: float = 1e-10) -> float:
    """Minimum eigenvalue of a Hermitian section."""
    k = _as_matrix(kernel)
    if k.shape[0] != k.shape[1]:
        raise ValueError("section must be square")
    scale = max(1.0, float(np.abs(k).max()) if k.size else 0.0)
    if k.size and float(np.abs(k - k.conj().T).max()) > herm_tol * scale:
        raise ValueError("section is not Hermitian")
    return float(np.linalg.eigvalsh(k)[0])


# -- the sandwich -------------------------------------------------------------------


class SandwichError(AssertionError):
    """Ordering violation; carries the full diagnostic bundle."""

    def __init__(self, message: str, bundle: dict):
        super().__init__(message)
        self.bundle = bundle


@dataclass(frozen=True)
class SandwichReport:
    """lower bound <= cb norm <= certificate bound, with the gaps."""

    dim: int
    tol: float
    lower: LowerBoundResult
    cb: CbNormResult | None
    certificate_bound: float | None
    certificate_kind: str | None
    gap_lower_cb: float | None
    gap_cb_certificate: float | None


def sandwich_report(kernel, certificate=None, tol: float = 1e-6,
                    dim_cap: int = DIM_CAP, seed: int = 0) -> SandwichReport:
    """Run the witness bound, the cb solver, and the certificate comparison.

    The cb stage is skipped past dim_cap; the sandwich then checks the
    witness bound directly against the certificate.  Any ordering violation
    raises SandwichError with the witness matrix and certificate data
    attached, rather than returning a quietly inconsistent report.
    """
    k = _as_matrix(kernel)
    n = k.shape[0]
    lo = lower_bound(kernel, seed=seed)
    cb = cb_norm_sdp(kernel, tol=min(1e-7, 0.1 * tol)) if n <= dim_cap else None
    cert_bound = None
    cert_kind = None
    if certificate is not None:
        cert_bound = float(certificate.bound)
        cert_kind = certificate.kind

    def bundle():
        return {"dim": n, "tol": tol,
                "lower_value": lo.value, "lower_strategy": lo.strategy,
                "witness": lo.witness,
                "cb": None if cb is None else cb.value,
                "cb_inconclusive": None if cb is None else cb.inconclusive,
                "certificate_bound": cert_bound,
                "certificate": None if certificate is None
                else certificate.to_json_dict()}

    if cb is not None and lo.value > cb.value + tol:
        raise SandwichError(
            f"lower bound {lo.value:.9g} exceeds cb {cb.value:.9g} + {tol}",
            bundle())
    if cb is not None and cert_bound is not None and cb.value > cert_bound + tol:
        raise SandwichError(
            f"cb {cb.value:.9g} exceeds certificate {cert_bound:.9g} + {tol}",
            bundle())
    if cb is None and cert_bound is not None and lo.value > cert_bound + tol:
        raise SandwichError(
            f"lower bound {lo.value:.9g} exceeds certificate "
            f"{cert_bound:.9g} + {tol}", bundle())
    return SandwichReport(
        dim=n, tol=tol, lower=lo, cb=cb, certificate_bound=cert_bound,
        certificate_kind=cert_kind,
        gap_lower_cb=None if cb is None else cb.value - lo.value,
        gap_cb_certificate=None if cb is None or cert_bound is None
        else cert_bound - cb.value)
