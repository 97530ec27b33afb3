"""Tensor vectors over corridor sets and the kernel factorizations they carry.

The chain built on top of the corridor tables:

  xi factors (one per corridor level)
    -> eta tensor vectors, whose mixed inner products are the Z indicators
    -> zeta geometric series in z with |z| < 1
    -> kernel values z^{d(x,y)} with explicit error bars
    -> norm certificates for theta_z, distance spheres, radial cuts,
       and the pointwise-to-1 witness schedule.

Desk-scale arithmetic is exact: eta inner products are integers, Gram
entries are (2^e1 - 1) * 2^e2 pairs carried as exponent pairs, and norm
sums are accumulated in log2 space, so paper-sized constants (C0 far past
float range) degrade to bound = inf while bound_log2 stays finite.
"""

from __future__ import annotations

import cmath
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from weakref import WeakKeyDictionary

import numpy as np

from .corridor import (CorridorParams, corridor_set, empirical_params,
                       get_engine, pair_level_scan)
from .graphs import Graph, GraphError
from .subsets import XI_CAP_DEFAULT, SubsetVector, XiFactor

__all__ = [
    "TensorVector", "eta", "eta_inner", "eta_inner_table",
    "ZetaVector", "zeta", "k_max_for",
    "KernelValue", "zeta_kernel", "ZetaKernelTable", "zeta_kernel_table",
    "kernel_ready_params", "holomorphy_residual", "holomorphy_profile",
    "NormCertificate", "write_certificate", "read_certificate",
    "theta_certificate", "z_relation_certificate", "sphere_certificate",
    "RadialFunction", "radial_multiplier", "ScheduleStep", "radial_schedule",
    "WeakAmenabilityWitness", "weak_amenability_witness",
    "KernelMatrix", "power_kernel", "ball_kernel", "sphere_kernel",
    "radial_kernel", "relation_kernel", "custom_kernel",
    "write_kernel", "read_kernel",
    "c0_exponent", "c0_exact", "constants_summary", "encode_big_int",
]


# -- exponent-space arithmetic -------------------------------------------------


def _log2_int(v: int) -> float:
    """log2 of a positive integer, safe far past float range."""
    if v <= 0:
        raise ValueError("log2 of a non-positive integer")
    bl = v.bit_length()
    if bl <= 53:
        return math.log2(v)
    return (bl - 53) + math.log2(v >> (bl - 53))


def _pow2(lg: float) -> float:
    if lg == -math.inf:
        return 0.0
    try:
        return 2.0 ** lg
    except OverflowError:
        return math.inf


def _log2_sum(lgs) -> float:
    """log2 of sum(2^lg) over non-negative terms."""
    lgs = [lg for lg in lgs if lg != -math.inf]
    if not lgs:
        return -math.inf
    top = max(lgs)
    return top + math.log2(sum(2.0 ** (lg - top) for lg in lgs))


def _signed_pow2_sum(terms) -> float | None:
    """log2 of sum(sign * 2^lg); the total must be strictly positive."""
    terms = [(s, lg) for s, lg in terms if lg != -math.inf]
    if not terms:
        return None
    top = max(lg for _, lg in terms)
    acc = 0.0
    for s, lg in terms:
        acc += s * 2.0 ** (lg - top)
    if acc <= 0.0:
        raise ArithmeticError("norm accumulation cancelled below float precision")
    return top + math.log2(acc)


def _gram_log2(e1: int, e2: int) -> float | None:
    """log2 of (2^e1 - 1) * 2^e2; None encodes a zero Gram entry (e1 = 0)."""
    if e1 <= 0:
        return None
    if e1 > 53:
        return float(e1 + e2)  # 1 - 2^-e1 rounds to 1 at double precision
    return e1 + e2 + math.log2(1.0 - 2.0 ** (-e1))


def encode_big_int(v: int):
    """JSON-safe exact integers; powers of two past int64 become '2^e'."""
    if -(1 << 63) < v < (1 << 63):
        return int(v)
    if v > 0 and v.bit_count() == 1:
        return f"2^{v.bit_length() - 1}"
    # paper-regime values overflow the interpreter's str-conversion guard
    limit = sys.get_int_max_str_digits()
    need = int(abs(v).bit_length() * 0.30103) + 3
    if 0 < limit < need:
        sys.set_int_max_str_digits(need)
    return str(v)


def _decode_big_int(v) -> int:
    if isinstance(v, str):
        if v.startswith("2^"):
            return 1 << int(v[2:])
        limit = sys.get_int_max_str_digits()
        if 0 < limit < len(v):
            sys.set_int_max_str_digits(len(v) + 1)
        return int(v)
    return int(v)


# -- factorization constants ---------------------------------------------------


def c0_exponent(graph: Graph, params: CorridorParams) -> int:
    """Exponent of C0 = 2^{C1 (1 + R1)} for this snapshot and parameter set."""
    return get_engine(graph, params).c1() * (1 + params.r1)


def c0_exact(graph: Graph, params: CorridorParams) -> int:
    """C0 as an exact integer; the certificate constant is C = 2 C0."""
    return 1 << c0_exponent(graph, params)


def constants_summary(graph: Graph, params: CorridorParams) -> dict:
    """The constant chain C1 -> C0 -> C for one parameter set, JSON-ready."""
    c1 = get_engine(graph, params).c1()
    e = c1 * (1 + params.r1)
    return {
        "mode": params.mode,
        "rho": str(params.rho),
        "delta": None if params.delta is None else float(params.delta),
        "C1": c1,
        "R0": params.r0,
        "R1": params.r1,
        "C0": encode_big_int(1 << e),
        "C0_log2": e,
        "C": encode_big_int(1 << (e + 1)),
    }


# -- eta tensor vectors ---------------------------------------------------------


@dataclass(frozen=True)
class TensorVector:
    """Ordered tensor of xi factors, one per corridor level; 1 + R1 slots.

    Inner products and norms factor through the slot list, so nothing with
    2^{|S|} entries is ever materialized unless a test asks for it.
    """

    factors: tuple[XiFactor, ...]

    def __len__(self) -> int:
        return len(self.factors)

    def is_zero(self) -> bool:
        return any(f.is_zero() for f in self.factors)

    def inner(self, other: "TensorVector") -> int:
        """<self, other> with self in the conjugate slot; exact integer."""
        if len(self.factors) != len(other.factors):
            raise ValueError("tensor factor counts differ")
        total = 1
        for a, b in zip(self.factors, other.factors):
            total *= a.inner(b)
            if total == 0:
                return 0
        return total

    def norm_sq(self) -> int:
        total = 1
        for f in self.factors:
            total *= f.norm_sq()
            if total == 0:
                return 0
        return total

    def materialized(self, cap: int = XI_CAP_DEFAULT) -> tuple[SubsetVector, ...]:
        """Dense per-factor view for cross-checks; cap guards the blowup."""
        return tuple(f.materialize(cap) for f in self.factors)


def eta(graph: Graph, w: int, m: int, sign: str, params: CorridorParams,
        strict: bool = False) -> TensorVector:
    """Tensor vector anchored at level m: the untilded factor first, then
    R1 tilded factors marching up (+) or down (-) one level at a time.

    Negative levels contribute the empty corridor, whose tilded xi is the
    delta at the empty set; the whole vector is zero iff T(w, m) is empty.
    """
    if sign not in {"+", "-"}:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    if m < 0:
        raise ValueError("anchor level must be non-negative")
    eng = get_engine(graph, params)
    step = 1 if sign == "+" else -1
    levels = [m + step * j for j in range(params.r1 + 1)]
    if strict:
        # surfaces TruncationError when the deepest level outruns the ray
        corridor_set(graph, w, max(levels), params, strict=True)
    factors = []
    for j, lev in enumerate(levels):
        members = eng.members_set(w, lev) if lev >= 0 else frozenset()
        factors.append(XiFactor(sign=sign, tilde=(j > 0), members=members))
    return TensorVector(factors=tuple(factors))


def eta_inner(graph: Graph, x: int, k: int, y: int, l: int,
              params: CorridorParams) -> int:
    """<eta^-_l(y), eta^+_k(x)> by the factor product; equals chi_Z(k,l)(x,y)."""
    minus = eta(graph, y, l, "-", params)
    plus = eta(graph, x, k, "+", params)
    return minus.inner(plus)


def eta_inner_table(graph: Graph, k: int, l: int,
                    params: CorridorParams) -> np.ndarray:
    """All-core-pairs eta_inner at (k, l), evaluated slot by slot.

    Slot 0 contributes the meets-indicator of T(x,k) and T(y,l); tilded
    slot j contributes the disjointness indicator at (k+j, l-j).  These are
    exactly the values the XiFactor products take pairwise, computed here
    from bulk corridor intersections.
    """
    eng = get_engine(graph, params)
    table = eng.w_bool(k, l).astype(np.int8)
    for j in range(1, params.r1 + 1):
        if l - j < 0 or k + j > eng.max_level:
            break  # an empty corridor makes the slot factor identically 1
        table *= np.int8(1) - eng.w_bool(k + j, l - j).astype(np.int8)
    return table


# -- Gram data for the zeta norms ----------------------------------------------


def _gram_exponents(sizes: np.ndarray, cons: np.ndarray, r1: int, sign: str,
                    k_cap: int):
    """Exponent pairs (e1, e2) per level: Gram entry = (2^e1 - 1) * 2^e2.

    Diagonal entries use the corridor sizes, the (m, m+1) entries the shared
    shell counts; e2 sums the R1 tilded-slot exponents, windowed upward for
    the plus family and downward (clipped at level 0) for the minus family.
    """
    top = len(sizes) - 1
    cs_sizes = np.concatenate(([0], np.cumsum(sizes, dtype=np.int64)))
    cs_cons = np.concatenate(([0], np.cumsum(cons, dtype=np.int64)))

    def wsum(cs, a, b):
        a = max(a, 0)
        b = min(b, top)
        if a > b:
            return 0
        return int(cs[b + 1] - cs[a])

    diag = []
    off = []
    for m in range(k_cap + 1):
        if sign == "+":
            lo, hi = m + 1, m + r1
        else:
            lo, hi = m - r1, m - 1
        e1d = int(sizes[m]) if m <= top else 0
        e1o = int(cons[m]) if m <= top else 0
        diag.append((e1d, wsum(cs_sizes, lo, hi)))
        off.append((e1o, wsum(cs_cons, lo, hi)))
    return diag, off


def _zeta_norm_sq_log2(z: complex, sign: str, sizes, cons, r1: int,
                       k_cap: int) -> float:
    """log2 of the truncated zeta Gram norm squared at one vertex.

    Adjacent levels are the only Gram couplings, so the square norm is
    |1 - z| * sum_m |z|^{2m} (G_mm + 2 Re(z) G_{m,m+1}); the cross terms
    pick up the sign of Re(z) and everything is accumulated scaled by the
    largest exponent seen.
    """
    z = complex(z)
    diag, off = _gram_exponents(sizes, cons, r1, sign, k_cap)
    az = abs(z)
    lg_az2 = 2.0 * math.log2(az) if az > 0.0 else -math.inf
    re2 = 2.0 * z.real
    lg_re2 = math.log2(abs(re2)) if re2 != 0.0 else None
    sgn_re = 1 if re2 > 0 else -1
    terms: list[tuple[int, float]] = []
    for m in range(k_cap + 1):
        shift = m * lg_az2 if m else 0.0
        if shift == -math.inf:
            break  # z = 0 keeps only the level-0 term
        g = _gram_log2(*diag[m])
        if g is not None:
            terms.append((1, g + shift))
        if lg_re2 is not None and m < k_cap:
            go = _gram_log2(*off[m])
            if go is not None:
                terms.append((sgn_re, go + lg_re2 + shift))
    total = _signed_pow2_sum(terms)
    if total is None:
        raise ArithmeticError("zeta vector has empty support")
    return math.log2(abs(1.0 - z)) + total


def k_max_for(z: complex, tol: float, c0_exp: int) -> int:
    """Smallest K with sqrt(C0) |1-z|^{1/2} |z|^{K+1} / (1 - |z|) <= tol."""
    z = complex(z)
    az = abs(z)
    if az >= 1.0:
        raise ValueError("series parameter needs |z| < 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if az == 0.0:
        return 0
    head = 0.5 * c0_exp + 0.5 * math.log2(abs(1.0 - z)) - math.log2(1.0 - az)
    lg_az = math.log2(az)
    k = max(0, math.ceil((math.log2(tol) - head) / lg_az - 1.0))
    while head + (k + 1) * lg_az > math.log2(tol):  # float-edge nudge
        k += 1
    return k


# -- zeta vectors ----------------------------------------------------------------


@dataclass(frozen=True)
class ZetaVector:
    """Truncated geometric combination of eta vectors at one vertex.

    terms holds (coefficient, level, tensor) triples; the plus family uses
    conj(z)^k with prefactor conj(sqrt(1-z)), the minus family z^l with
    sqrt(1-z) (principal branch).  norm_sq is the exact Gram value of the
    truncation, inf once past float range; norm_sq_log2 is always finite.
    """

    sign: str
    vertex: int
    z: complex
    prefactor: complex
    k_max: int
    k_max_formula: int
    tol: float
    terms: tuple[tuple[complex, int, TensorVector], ...]
    norm_sq: float
    norm_sq_log2: float
    tail_bound: float

    def norm(self) -> float:
        return math.sqrt(self.norm_sq) if math.isfinite(self.norm_sq) else math.inf

    def inner(self, other: "ZetaVector") -> complex:
        """<self, other> by expanding both term lists; exact Gram per term."""
        total = 0.0 + 0.0j
        for ci, _, ti in self.terms:
            for cj, _, tj in other.terms:
                g = ti.inner(tj)
                if g:
                    total += ci.conjugate() * cj * g
        return self.prefactor.conjugate() * other.prefactor * total


def zeta(graph: Graph, w: int, z: complex, sign: str, tol: float,
         params: CorridorParams) -> ZetaVector:
    """Truncated zeta series at one vertex.

    The cut is the smaller of the tol-driven K_max and the last level with a
    nonempty corridor; past the latter every eta vector vanishes, so the
    discarded tail is exactly zero and tail_bound reports 0.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("zeta series needs |z| < 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    eng = get_engine(graph, params)
    sizes, cons = eng.level_profile(int(w))
    c0e = eng.c1() * (1 + params.r1)
    kf = k_max_for(z, tol, c0e)
    nz = np.flatnonzero(sizes)
    m_end = int(nz[-1]) if nz.size else 0
    k_used = min(kf, m_end)
    lg = _zeta_norm_sq_log2(z, sign, sizes, cons, params.r1, k_used)
    if sign == "+":
        prefactor = cmath.sqrt(1.0 - z).conjugate()

        def coeff(m):
            return z.conjugate() ** m
    else:
        prefactor = cmath.sqrt(1.0 - z)

        def coeff(m):
            return z ** m
    terms = tuple((coeff(m), m, eta(graph, w, m, sign, params))
                  for m in range(k_used + 1))
    az = abs(z)
    if k_used < m_end and az > 0.0:
        tail_lg = (0.5 * c0e + 0.5 * math.log2(abs(1.0 - z))
                   + (k_used + 1) * math.log2(az) - math.log2(1.0 - az))
        tail = _pow2(tail_lg)
    else:
        tail = 0.0
    return ZetaVector(sign=sign, vertex=int(w), z=z, prefactor=prefactor,
                      k_max=k_used, k_max_formula=kf, tol=float(tol),
                      terms=terms, norm_sq=_pow2(lg), norm_sq_log2=lg,
                      tail_bound=tail)


# -- kernel evaluation -----------------------------------------------------------


@dataclass(frozen=True)
class KernelValue:
    """One kernel entry with its deviation bound against the ideal z^d."""

    value: complex
    bound: float
    distance: int
    n_eval: int
    method: str


_SCANS: WeakKeyDictionary = WeakKeyDictionary()


def _full_scan(graph: Graph, params: CorridorParams):
    """Pair scan to the natural depth 2 * max_level + 2, cached per rho.

    No witness produces a level beyond that depth, so one scan serves every
    z and tolerance on the snapshot.
    """
    eng = get_engine(graph, params)
    n_cut = 2 * eng.max_level + 2
    per = _SCANS.get(graph)
    if per is None:
        per = {}
        _SCANS[graph] = per
    key = (str(params.rho), n_cut)
    scan = per.get(key)
    if scan is None:
        scan = pair_level_scan(graph, params, n_cut)
        per[key] = scan
    return scan


def _require_one_hit(scan, params: CorridorParams) -> None:
    if scan.max_span > params.r1:
        raise GraphError(
            f"pair-scan span {scan.max_span} exceeds R1 = {params.r1}: level sums "
            "would double-count; rebuild parameters with kernel_ready_params")


def zeta_kernel(graph: Graph, x: int, y: int, z: complex, tol: float,
                params: CorridorParams, method: str = "table") -> KernelValue:
    """Kernel entry <zeta^+_z(x), zeta^-_z(y)> with an explicit error bar
    against the ideal value z^{d(x,y)}.

    The pairing is conjugate-linear in the plus slot, which is the order
    that makes the level sums telescope to z^d rather than its conjugate.
    The table route sums (1 - z) z^n over the live levels of the pair scan
    (each live level carries exactly one Z hit once R1 clears the measured
    span); the tensor route expands the two truncated term lists and pays
    an extra 2 tol sqrt(2 C0 |1-z| / (1-|z|)) in its bound.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("kernel evaluation needs |z| < 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    eng = get_engine(graph, params)
    scan = _full_scan(graph, params)
    _require_one_hit(scan, params)
    try:
        i = scan.vertices.index(int(x))
        j = scan.vertices.index(int(y))
    except ValueError:
        raise GraphError(f"({x}, {y}) is not a core pair") from None
    d = int(eng.distance_row(int(x))[int(y)])
    az = abs(z)
    c0e = eng.c1() * (1 + params.r1)
    kf = k_max_for(z, tol, c0e)
    n_eval = min(kf, scan.n_limit)

    def table_bound(ncut: int) -> float:
        live = scan.live[i, j, : ncut + 1]
        npow = np.arange(ncut + 1)
        dev = live != (npow >= d)
        azp = az ** npow
        tail = (az ** (ncut + 1)) / (1.0 - az) if az > 0.0 else 0.0
        return abs(1.0 - z) * (float(azp[dev].sum()) + tail)

    if method == "table":
        live = scan.live[i, j, : n_eval + 1]
        zp = z ** np.arange(n_eval + 1)
        value = (1.0 - z) * complex(zp[live].sum())
        bound = table_bound(n_eval)
    elif method == "tensor":
        vx = zeta(graph, x, z, "+", tol, params)
        vy = zeta(graph, y, z, "-", tol, params)
        value = vx.inner(vy)
        # either truncated series can move the pairing by tol times the
        # other's norm, itself under the analytic ceiling
        half = 0.5 * (1.0 + c0e + math.log2(abs(1.0 - z)) - math.log2(1.0 - az))
        bound = table_bound(scan.n_limit) + 2.0 * tol * _pow2(half)
    else:
        raise ValueError(f"unknown kernel method {method!r}")
    return KernelValue(value=value, bound=float(bound), distance=d,
                       n_eval=int(n_eval), method=method)


@dataclass(frozen=True)
class ZetaKernelTable:
    """All core pairs of the factorized kernel at one z, with error bars."""

    vertices: tuple[int, ...]
    z: complex
    tol: float
    n_eval: int
    k_max_formula: int
    max_span: int
    distances: np.ndarray
    values: np.ndarray
    bounds: np.ndarray

    def kernel_matrix(self) -> "KernelMatrix":
        return KernelMatrix(self.values, self.vertices,
                            {"kind": "zeta", "z": [self.z.real, self.z.imag],
                             "tol": self.tol, "n_eval": self.n_eval})


def zeta_kernel_table(graph: Graph, z: complex, tol: float,
                      params: CorridorParams) -> ZetaKernelTable:
    """zeta_kernel for every core pair at once (table route)."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("kernel evaluation needs |z| < 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    eng = get_engine(graph, params)
    scan = _full_scan(graph, params)
    _require_one_hit(scan, params)
    core = np.array(scan.vertices)
    m = len(core)
    dc = graph.distance_matrix()[np.ix_(core, core)]
    az = abs(z)
    c0e = eng.c1() * (1 + params.r1)
    kf = k_max_for(z, tol, c0e)
    n_eval = min(kf, scan.n_limit)
    npow = np.arange(n_eval + 1)
    zp = z ** npow
    azp = az ** npow
    tail = (az ** (n_eval + 1)) / (1.0 - az) if az > 0.0 else 0.0
    values = np.empty((m, m), dtype=np.complex128)
    bounds = np.empty((m, m), dtype=np.float64)
    for i in range(m):  # row chunks keep the float casts small
        live = scan.live[i, :, : n_eval + 1].astype(np.float64)
        values[i] = (1.0 - z) * (live @ zp)
        dev = live != (npow[None, :] >= dc[i][:, None])
        bounds[i] = abs(1.0 - z) * ((dev @ azp) + tail)
    values.setflags(write=False)
    bounds.setflags(write=False)
    dc.setflags(write=False)
    return ZetaKernelTable(vertices=scan.vertices, z=z, tol=float(tol),
                           n_eval=int(n_eval), k_max_formula=int(kf),
                           max_span=scan.max_span, distances=dc,
                           values=values, bounds=bounds)


def kernel_ready_params(graph: Graph, rho: float | None = None) -> CorridorParams:
    """Empirical parameters deep-scanned far enough for kernel sums.

    The default width diameter + 1 keeps every vertex near every ray, which
    maximizes corridor lifetimes and so minimizes the finite-snapshot kernel
    deviation; the scan depth covers every level a witness can reach, so the
    measured R1 is the one-hit threshold for the whole table.
    """
    if rho is None:
        rho = float(int(graph.distance_matrix().max()) + 1)
    seed = CorridorParams(rho=float(rho), r0=0, r1=0, mode="empirical")
    eng = get_engine(graph, seed)
    n_cut = 2 * eng.max_level + 2
    return empirical_params(graph, n_max=n_cut, rho=float(rho))


def holomorphy_residual(graph: Graph, x: int, y: int, z: complex, h: float,
                        params: CorridorParams, tol: float = 1e-10) -> float:
    """Discrete Cauchy-Riemann defect of z -> kernel(x, y) at spacing h."""
    z = complex(z)
    h = float(h)
    if h <= 0.0:
        raise ValueError("spacing must be positive")
    for p in (z + h, z - h, z + 1j * h, z - 1j * h):
        if abs(p) >= 1.0:
            raise ValueError("stencil leaves the unit disk")

    def f(p):
        return zeta_kernel(graph, x, y, p, tol, params).value

    dx = (f(z + h) - f(z - h)) / (2.0 * h)
    dy = (f(z + 1j * h) - f(z - 1j * h)) / (2.0 * h)
    return abs(dx + 1j * dy)


def holomorphy_profile(graph: Graph, x: int, y: int, z: complex, spacings,
                       params: CorridorParams, tol: float = 1e-10) -> tuple:
    """Residuals across shrinking spacings; analytic entries decay like h^2."""
    return tuple(holomorphy_residual(graph, x, y, z, h, params, tol)
                 for h in spacings)


# -- norm certificates -----------------------------------------------------------


_CERT_JSON_KEYS = ("kind", "mode", "bound", "bound_log2", "sup_norm_plus",
                   "sup_norm_minus", "C1", "R1", "C0", "C", "z", "n", "tol",
                   "K_max", "analytic_bound", "analytic_bound_log2", "delta",
                   "rho", "composite", "parts")


@dataclass(frozen=True)
class NormCertificate:
    """Factorization upper bound sup||zeta+|| * sup||zeta-|| plus context.

    Atomic kinds (theta, zrel) satisfy bound = sup_norm_plus * sup_norm_minus
    exactly; composite kinds (sphere, radial, witness) are sums of atomic
    bounds and carry the per-term data in parts.  Every magnitude also
    appears in log2 form so paper-mode constants stay auditable after the
    float value has clipped to inf.
    """

    kind: str
    mode: str
    bound: float
    bound_log2: float
    sup_norm_plus: float
    sup_norm_minus: float
    c1: int
    r1: int
    c0: int
    z: complex | None = None
    n: int | None = None
    tol: float | None = None
    k_max: int | None = None
    analytic_bound: float | None = None
    analytic_bound_log2: float | None = None
    delta: float | None = None
    rho: str | None = None
    composite: bool = False
    parts: tuple = ()

    def __post_init__(self):
        if self.bound < 0 or self.sup_norm_plus < 0 or self.sup_norm_minus < 0:
            raise ValueError("certificate norms must be non-negative")
        if not self.composite and math.isfinite(self.bound) and self.bound > 0:
            prod = self.sup_norm_plus * self.sup_norm_minus
            if abs(prod - self.bound) > 1e-9 * max(1.0, abs(self.bound)):
                raise ValueError("atomic certificate violates bound = sup+ * sup-")

    def to_json_dict(self) -> dict:
        vals = {
            "kind": self.kind,
            "mode": self.mode,
            "bound": self.bound,
            "bound_log2": self.bound_log2,
            "sup_norm_plus": self.sup_norm_plus,
            "sup_norm_minus": self.sup_norm_minus,
            "C1": self.c1,
            "R1": self.r1,
            "C0": encode_big_int(self.c0),
            "C": encode_big_int(2 * self.c0),
            "z": None if self.z is None else [self.z.real, self.z.imag],
            "n": self.n,
            "tol": self.tol,
            "K_max": self.k_max,
            "analytic_bound": self.analytic_bound,
            "analytic_bound_log2": self.analytic_bound_log2,
            "delta": self.delta,
            "rho": self.rho,
            "composite": self.composite,
            "parts": list(self.parts),
        }
        return {k: vals[k] for k in _CERT_JSON_KEYS}

    @classmethod
    def from_json_dict(cls, d: dict) -> "NormCertificate":
        z = d.get("z")
        return cls(kind=d["kind"], mode=d["mode"], bound=float(d["bound"]),
                   bound_log2=float(d["bound_log2"]),
                   sup_norm_plus=float(d["sup_norm_plus"]),
                   sup_norm_minus=float(d["sup_norm_minus"]),
                   c1=int(d["C1"]), r1=int(d["R1"]),
                   c0=_decode_big_int(d["C0"]),
                   z=None if z is None else complex(z[0], z[1]),
                   n=d.get("n"), tol=d.get("tol"), k_max=d.get("K_max"),
                   analytic_bound=d.get("analytic_bound"),
                   analytic_bound_log2=d.get("analytic_bound_log2"),
                   delta=d.get("delta"), rho=d.get("rho"),
                   composite=bool(d.get("composite", False)),
                   parts=tuple(d.get("parts", ())))


def write_certificate(cert: NormCertificate, path) -> None:
    Path(path).write_text(json.dumps(cert.to_json_dict(), indent=2) + "\n")


def read_certificate(path) -> NormCertificate:
    return NormCertificate.from_json_dict(json.loads(Path(path).read_text()))


def theta_certificate(graph: Graph, z: complex, params: CorridorParams,
                      tol: float = 1e-9) -> NormCertificate:
    """Sup-norm product for the z^d factorization, exact Gram route.

    The analytic ceiling 2 C0 |1-z| / (1-|z|) is recorded next to the
    measured product and the measured value must stay below it; on the
    real axis the ceiling collapses to 2 C0.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("theta certificate needs |z| < 1")
    eng = get_engine(graph, params)
    c1 = eng.c1()
    c0e = c1 * (1 + params.r1)
    kf = k_max_for(z, tol, c0e)
    best_p = -math.inf
    best_m = -math.inf
    for w in eng.core:
        sizes, cons = eng.level_profile(int(w))
        nz = np.flatnonzero(sizes)
        m_end = int(nz[-1]) if nz.size else 0
        cap = min(kf, m_end)
        best_p = max(best_p, _zeta_norm_sq_log2(z, "+", sizes, cons,
                                                params.r1, cap))
        best_m = max(best_m, _zeta_norm_sq_log2(z, "-", sizes, cons,
                                                params.r1, cap))
    bound_lg = 0.5 * best_p + 0.5 * best_m
    az = abs(z)
    ana_lg = 1.0 + c0e + math.log2(abs(1.0 - z)) - math.log2(1.0 - az)
    if bound_lg > ana_lg + 1e-7:
        raise ArithmeticError(
            f"Gram bound 2^{bound_lg:.6f} exceeds the analytic ceiling "
            f"2^{ana_lg:.6f}")
    return NormCertificate(
        kind="theta", mode=params.mode, bound=_pow2(bound_lg),
        bound_log2=bound_lg, sup_norm_plus=_pow2(0.5 * best_p),
        sup_norm_minus=_pow2(0.5 * best_m), c1=c1, r1=params.r1, c0=1 << c0e,
        z=z, tol=float(tol), k_max=kf, analytic_bound=_pow2(ana_lg),
        analytic_bound_log2=ana_lg,
        delta=None if params.delta is None else float(params.delta),
        rho=str(params.rho), composite=False)


def _sup_eta_norms_sq(graph: Graph, params: CorridorParams, sign: str,
                      max_level: int) -> list[int]:
    """Per-level exact sup_w ||eta_m(w)||^2 over the core, as big integers."""
    eng = get_engine(graph, params)
    sup = [0] * (max_level + 1)
    for w in eng.core:
        sizes, cons = eng.level_profile(int(w))
        diag, _ = _gram_exponents(sizes, cons, params.r1, sign, max_level)
        for m in range(max_level + 1):
            e1, e2 = diag[m]
            if e1:
                val = ((1 << e1) - 1) << e2
                if val > sup[m]:
                    sup[m] = val
    return sup


def z_relation_certificate(graph: Graph, k: int, l: int,
                           params: CorridorParams) -> NormCertificate:
    """sup_w ||eta^+_k|| * sup_w ||eta^-_l||, exact integers under the sqrt."""
    if k < 0 or l < 0:
        raise ValueError("relation levels must be non-negative")
    eng = get_engine(graph, params)
    c1 = eng.c1()
    c0 = 1 << (c1 * (1 + params.r1))
    a2 = _sup_eta_norms_sq(graph, params, "+", k)[k]
    b2 = _sup_eta_norms_sq(graph, params, "-", l)[l]
    if a2 * b2 > c0 * c0:
        raise ArithmeticError("eta norm product exceeds C0^2")
    lg_a = _log2_int(a2) if a2 else -math.inf
    lg_b = _log2_int(b2) if b2 else -math.inf
    bound_lg = 0.5 * (lg_a + lg_b) if a2 and b2 else -math.inf
    return NormCertificate(
        kind="zrel", mode=params.mode, bound=_pow2(bound_lg),
        bound_log2=bound_lg, sup_norm_plus=_pow2(0.5 * lg_a),
        sup_norm_minus=_pow2(0.5 * lg_b), c1=c1, r1=params.r1, c0=c0,
        n=k + l, rho=str(params.rho),
        delta=None if params.delta is None else float(params.delta),
        composite=False, parts=({"k": k, "l": l},))


def sphere_certificate(graph: Graph, n: int,
                       params: CorridorParams) -> NormCertificate:
    """Additive certificate for the distance-n shell.

    chi_{d=n} = chi_{E(n)} - chi_{E(n-1)}, and each E splits over its Z
    diagonal, so the bound is the sum of exact sup-norm products over both
    diagonals.  Every term is at most C0, giving bound <= (2n + 1) C0; the
    tree reference value 2 (n + 1) is reported as a ratio in the parts.
    """
    if n < 0:
        raise ValueError("sphere index must be non-negative")
    eng = get_engine(graph, params)
    c1 = eng.c1()
    c0 = 1 << (c1 * (1 + params.r1))
    sup_p = _sup_eta_norms_sq(graph, params, "+", n)
    sup_m = _sup_eta_norms_sq(graph, params, "-", n)
    parts = []
    term_lgs = []
    for nn in (n, n - 1):
        for k in range(nn + 1):
            l = nn - k
            a2, b2 = sup_p[k], sup_m[l]
            if a2 == 0 or b2 == 0:
                parts.append({"E": nn, "k": k, "l": l, "term": 0.0})
                continue
            if a2 * b2 > c0 * c0:  # exact: each factor is at most C0
                raise ArithmeticError("eta norm product exceeds C0^2")
            lg = 0.5 * (_log2_int(a2) + _log2_int(b2))
            term_lgs.append(lg)
            parts.append({"E": nn, "k": k, "l": l, "term": _pow2(lg),
                          "term_log2": lg})
    bound_lg = _log2_sum(term_lgs)
    ceiling_lg = _log2_int((2 * n + 1) * c0)
    if bound_lg > ceiling_lg + 1e-7:
        raise ArithmeticError("sphere bound exceeds the (2n + 1) C0 ceiling")
    bp_reference = 2.0 * (n + 1)
    parts.append({"linear_ceiling": encode_big_int((2 * n + 1) * c0),
                  "bp_reference": bp_reference,
                  "bp_ratio_log2": bound_lg - math.log2(bp_reference)})
    lg_p = max((0.5 * _log2_int(v) for v in sup_p if v), default=-math.inf)
    lg_m = max((0.5 * _log2_int(v) for v in sup_m if v), default=-math.inf)
    return NormCertificate(
        kind="sphere", mode=params.mode, bound=_pow2(bound_lg),
        bound_log2=bound_lg, sup_norm_plus=_pow2(lg_p),
        sup_norm_minus=_pow2(lg_m), c1=c1, r1=params.r1, c0=c0, n=n,
        rho=str(params.rho),
        delta=None if params.delta is None else float(params.delta),
        composite=True, parts=tuple(parts))


# -- radial multipliers and the witness schedule ----------------------------------


@dataclass(frozen=True)
class RadialFunction:
    """f(m) = r^m for m <= cutoff, 0 past it; values precomputed."""

    r: float
    cutoff: int
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError("base must satisfy 0 < r < 1")
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        if not self.values:
            object.__setattr__(
                self, "values",
                tuple(self.r ** m for m in range(self.cutoff + 1)))
        elif len(self.values) != self.cutoff + 1:
            raise ValueError("values length must be cutoff + 1")

    def value(self, m: int) -> float:
        return self.values[m] if 0 <= m <= self.cutoff else 0.0

    __call__ = value


def radial_multiplier(graph: Graph, r: float, cutoff: int,
                      params: CorridorParams,
                      tol: float = 1e-9) -> tuple[RadialFunction, NormCertificate]:
    """Truncated exponential multiplier r^m [m <= cutoff] plus certificate.

    The bound is the theta certificate at z = r plus the analytic tail
    sum_{m > cutoff} r^m * 2 C0 (m + 1), in closed form
    2 C0 r^{K+1} ((K + 2) - (K + 1) r) / (1 - r)^2.
    """
    r = float(r)
    if not 0.0 < r < 1.0:
        raise ValueError("base must satisfy 0 < r < 1")
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    theta = theta_certificate(graph, complex(r), params, tol)
    c0e = theta.c1 * (1 + params.r1)
    tail_lg = (1.0 + c0e + (cutoff + 1) * math.log2(r)
               + math.log2((cutoff + 2) - (cutoff + 1) * r)
               - 2.0 * math.log2(1.0 - r))
    tail = _pow2(tail_lg)
    bound_lg = _log2_sum([theta.bound_log2, tail_lg])
    f = RadialFunction(r=r, cutoff=int(cutoff))
    cert = NormCertificate(
        kind="radial", mode=params.mode, bound=theta.bound + tail,
        bound_log2=bound_lg, sup_norm_plus=theta.sup_norm_plus,
        sup_norm_minus=theta.sup_norm_minus, c1=theta.c1, r1=params.r1,
        c0=theta.c0, z=complex(r), n=int(cutoff), tol=float(tol),
        k_max=theta.k_max, delta=theta.delta, rho=theta.rho, composite=True,
        parts=({"theta_bound": theta.bound,
                "theta_bound_log2": theta.bound_log2,
                "tail_bound": tail, "tail_bound_log2": tail_lg},))
    return f, cert


@dataclass(frozen=True)
class ScheduleStep:
    """One step of the witness schedule: base r_n and cutoff K_n."""

    n: int
    r: float
    cutoff: int
    tail_log2: float


def radial_schedule(n: int, c0: int) -> ScheduleStep:
    """r_n = 1 - 1/(n + 1) and the least cutoff making the tail at most 1."""
    if n < 1:
        raise ValueError("the schedule starts at n = 1")
    r = n / (n + 1.0)
    lg_c0 = _log2_int(c0)

    def tail_lg(k: int) -> float:
        return (1.0 + lg_c0 + (k + 1) * math.log2(r)
                + math.log2((k + 2) - (k + 1) * r)
                - 2.0 * math.log2(1.0 - r))

    hi = 1
    while tail_lg(hi) > 0.0:
        hi *= 2
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if tail_lg(mid) <= 0.0:
            hi = mid
        else:
            lo = mid + 1
    while lo > 0 and tail_lg(lo - 1) <= 0.0:  # guard a non-monotone head
        lo -= 1
    return ScheduleStep(n=n, r=r, cutoff=lo, tail_log2=tail_lg(lo))


@dataclass(frozen=True)
class WeakAmenabilityWitness:
    """phi_n evaluated over all snapshot vertices, with its certificate."""

    n: int
    r: float
    cutoff: int
    base_point: int
    values: tuple[float, ...]
    group_provider: bool
    warning: str | None
    certificate: NormCertificate


def weak_amenability_witness(graph: Graph, n: int,
                             params: CorridorParams) -> WeakAmenabilityWitness:
    """phi_n(x) = r_n^{d(o, x)} cut at K_n.

    The certificate is at most 2 C0 + 1 by construction: the real-axis theta
    bound stays under 2 C0 and the schedule picks the cutoff so the sphere
    tail is at most 1.  Values are in [0, 1], equal 1 at the base point, and
    vanish past the cutoff radius.
    """
    step = radial_schedule(n, c0_exact(graph, params))
    f, cert = radial_multiplier(graph, step.r, step.cutoff, params)
    cert = replace(cert, kind="witness")
    dist = graph.distances(graph.base_point)
    values = tuple(f.value(int(d)) for d in dist)
    group = bool(graph.provider) and graph.provider.startswith("free_group")
    warning = None if group else \
        "provider is not a group Cayley graph; the base point is not an identity"
    return WeakAmenabilityWitness(n=int(n), r=step.r, cutoff=step.cutoff,
                                  base_point=graph.base_point, values=values,
                                  group_provider=group, warning=warning,
                                  certificate=cert)


# -- kernel matrices and their export ----------------------------------------------


@dataclass(frozen=True)
class KernelMatrix:
    """Complex kernel section over the core with a provenance descriptor."""

    values: np.ndarray
    vertices: tuple[int, ...]
    descriptor: dict

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("kernel section must be a square matrix")
        if v.shape[0] != len(self.vertices):
            raise ValueError("vertex list does not match the section size")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def _core_distances(graph: Graph):
    dist = graph.distances(graph.base_point)
    core = np.flatnonzero(dist <= graph.core_radius)
    return core, graph.distance_matrix()[np.ix_(core, core)]


def power_kernel(graph: Graph, z: complex) -> KernelMatrix:
    """z^{d(x,y)} straight from distances: the factorization's comparison
    target rather than its output."""
    z = complex(z)
    core, dc = _core_distances(graph)
    return KernelMatrix(z ** dc, tuple(int(v) for v in core),
                        {"kind": "power", "z": [z.real, z.imag]})


def ball_kernel(graph: Graph, n: int) -> KernelMatrix:
    core, dc = _core_distances(graph)
    return KernelMatrix((dc <= n).astype(np.complex128),
                        tuple(int(v) for v in core), {"kind": "ball", "n": int(n)})


def sphere_kernel(graph: Graph, n: int) -> KernelMatrix:
    core, dc = _core_distances(graph)
    return KernelMatrix((dc == n).astype(np.complex128),
                        tuple(int(v) for v in core), {"kind": "sphere", "n": int(n)})


def radial_kernel(graph: Graph, f: RadialFunction) -> KernelMatrix:
    core, dc = _core_distances(graph)
    table = np.array([f.value(m) for m in range(int(dc.max()) + 1)])
    return KernelMatrix(table[dc].astype(np.complex128),
                        tuple(int(v) for v in core),
                        {"kind": "radial", "r": f.r, "cutoff": f.cutoff})


def relation_kernel(graph: Graph, relation) -> KernelMatrix:
    """Indicator kernel of a corridor pair relation (W or Z at one (k, l))."""
    return KernelMatrix(relation.pairs.astype(np.complex128),
                        tuple(relation.vertices),
                        {"kind": "relation", "relation": relation.kind,
                         "k": relation.k, "l": relation.l})


def custom_kernel(values, vertices, note: str = "") -> KernelMatrix:
    return KernelMatrix(np.asarray(values, dtype=np.complex128),
                        tuple(int(v) for v in vertices),
                        {"kind": "custom", "note": note})


def write_kernel(kernel: KernelMatrix, matrix_path, descriptor_path=None) -> None:
    """Text matrix (rows of "re,im" entries) plus a JSON descriptor sidecar."""
    mp = Path(matrix_path)
    dp = Path(descriptor_path) if descriptor_path else mp.with_suffix(".json")
    lines = []
    for row in kernel.values:
        lines.append(" ".join(f"{float(c.real)!r},{float(c.imag)!r}" for c in row))
    mp.write_text("\n".join(lines) + "\n")
    doc = {"schema_version": 1, "descriptor": kernel.descriptor,
           "vertices": list(kernel.vertices), "dim": kernel.dim,
           "matrix_file": mp.name}
    dp.write_text(json.dumps(doc, indent=2) + "\n")


def read_kernel(matrix_path, descriptor_path=None) -> KernelMatrix:
    mp = Path(matrix_path)
    dp = Path(descriptor_path) if descriptor_path else mp.with_suffix(".json")
    rows = []
    for line in mp.read_text().splitlines():
        if not line.strip():
            continue
        row = []
        for tok in line.split():
            re_s, im_s = tok.split(",")
            row.append(complex(float(re_s), float(im_s)))
        rows.append(row)
    doc = json.loads(dp.read_text())
    return KernelMatrix(np.array(rows, dtype=np.complex128),
                        tuple(doc["vertices"]), doc["descriptor"])
