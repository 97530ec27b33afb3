"""Vectors over finite vertex subsets and their intersection-detecting inner products.

The ambient space is ell2 over the finite subsets of the vertex set.  For a
finite set S the four basic vectors are

    tilde_xi_plus_S(omega)  = 1            if omega is a subset of S, else 0
    tilde_xi_minus_S(omega) = (-1)^|omega| if omega is a subset of S, else 0
    xi_plus_S  = tilde_xi_plus_S - delta_empty
    xi_minus_S = -(tilde_xi_minus_S - delta_empty)

with the exact integer identities, m = |S n T|:

    <tilde +, tilde +> = <tilde -, tilde -> = 2^m
    <tilde -, tilde +> = 1 if m = 0 else 0
    <xi_minus_T, xi_plus_S> = 1 if S n T is nonempty else 0
    ||tilde xi||^2 = 2^|S|,  ||xi||^2 = 2^|S| - 1

Inner products are conjugate-linear in the first argument (all values here
are integers, so conjugation is invisible until the zeta layer).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SubsetKey = tuple[int, ...]

XI_CAP_DEFAULT = 20


class SubsetCapError(ValueError):
    """Materializing the vector would need more than 2^cap entries."""


def subset_key(ids) -> SubsetKey:
    """Canonical strictly-increasing tuple for a vertex set."""
    key = tuple(sorted(set(int(v) for v in ids)))
    if any(v < 0 for v in key):
        raise ValueError("vertex ids must be non-negative")
    return key


@dataclass
class SubsetVector:
    """Finitely supported map from subset keys to scalars; no stored zeros."""

    entries: dict[SubsetKey, complex] = field(default_factory=dict)

    def __post_init__(self):
        self.entries = {k: v for k, v in self.entries.items() if v != 0}

    def __getitem__(self, key) -> complex:
        return self.entries.get(subset_key(key), 0)

    def nnz(self) -> int:
        return len(self.entries)

    def scaled(self, c: complex) -> "SubsetVector":
        if c == 0:
            return SubsetVector({})
        return SubsetVector({k: c * v for k, v in self.entries.items()})

    def plus(self, other: "SubsetVector") -> "SubsetVector":
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k, 0) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return SubsetVector(out)

    def inner(self, other: "SubsetVector") -> complex:
        """<self, other>, conjugate-linear in self."""
        if len(self.entries) > len(other.entries):
            return _conj(other.inner(self))
        total = 0
        for k, v in self.entries.items():
            w = other.entries.get(k)
            if w is not None:
                total += _conj(v) * w
        return total

    def norm_sq(self):
        return sum(_conj(v) * v for v in self.entries.values())


def _conj(v):
    return v.conjugate() if isinstance(v, complex) else v


def delta_empty() -> SubsetVector:
    """The unit vector at the empty set."""
    return SubsetVector({(): 1})


def xi_vector(S, sign: str, tilde: bool = False, cap: int = XI_CAP_DEFAULT) -> SubsetVector:
    """Materialize one of the four basic vectors over the subsets of S.

    Support size is 2^|S|, so |S| is capped (default 20); a cap trip usually
    means the corridor width upstream is too generous for exact vectors.
    """
    key = subset_key(S)
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    if len(key) > cap:
        raise SubsetCapError(f"|S| = {len(key)} exceeds the materialization cap {cap}")
    entries: dict[SubsetKey, complex] = {}
    for mask in range(1 << len(key)):
        omega = tuple(key[i] for i in range(len(key)) if mask >> i & 1)
        value = 1 if sign == "+" else (-1) ** len(omega)
        entries[omega] = value
    tilde_vec = SubsetVector(entries)
    if tilde:
        return tilde_vec
    adjusted = tilde_vec.plus(delta_empty().scaled(-1))
    return adjusted if sign == "+" else adjusted.scaled(-1)


def xi_inner(S, T, cap: int = XI_CAP_DEFAULT) -> int:
    """<xi_minus_T, xi_plus_S> from materialized vectors: 1 iff S n T is nonempty."""
    value = xi_vector(T, "-", cap=cap).inner(xi_vector(S, "+", cap=cap))
    assert value == int(value.real if isinstance(value, complex) else value)
    return int(value.real if isinstance(value, complex) else value)


# -- lazy factors -----------------------------------------------------------
#
# Corridor sets can reach |S| ~ 20 at desk scale and the paper-mode widths
# make them the whole ball, so tensor factors are never materialized; every
# inner product reduces to |S n T| through the decomposition
# xi = a * tilde_xi + b * delta_empty with (a, b) as below.


@dataclass(frozen=True)
class XiFactor:
    """One tensor slot: (sign, tilde, S) with closed-form inner products."""

    sign: str
    tilde: bool
    members: frozenset[int]

    def _coeffs(self) -> tuple[int, int]:
        if self.tilde:
            return 1, 0
        return (1, -1) if self.sign == "+" else (-1, 1)

    def inner(self, other: "XiFactor") -> int:
        """<self, other> as exact int; conjugation is trivial on integers."""
        m = len(self.members & other.members)
        base = (1 << m) if self.sign == other.sign else (1 if m == 0 else 0)
        a1, b1 = self._coeffs()
        a2, b2 = other._coeffs()
        # tilde vectors take value 1 at the empty set regardless of sign
        return a1 * a2 * base + a1 * b2 + b1 * a2 + b1 * b2

    def norm_sq(self) -> int:
        n = len(self.members)
        return (1 << n) if self.tilde else (1 << n) - 1

    def is_zero(self) -> bool:
        return not self.tilde and not self.members

    def materialize(self, cap: int = XI_CAP_DEFAULT) -> SubsetVector:
        return xi_vector(sorted(self.members), self.sign, self.tilde, cap=cap)


# -- exhaustive binomial suite ------------------------------------------------


@dataclass(frozen=True)
class BinomialSuiteReport:
    """Exhaustive check of the intersection identities on a small universe."""

    universe: int
    pairs_checked: int
    norm_checks: int
    passed: bool
    failures: tuple[str, ...]


def binomial_suite(universe: int = 8) -> BinomialSuiteReport:
    """Check every (S, T) over a universe of the given size, exactly.

    Vectors are materialized densely (rows indexed by the subset bitmask) and
    all 4^universe inner products are taken by integer matrix product, then
    compared with the closed forms.
    """
    if universe > 12:
        raise SubsetCapError("exhaustive suite above 12 elements is deliberately refused")
    n = 1 << universe
    masks = np.arange(n, dtype=np.int64)
    is_subset = (masks[None, :] & ~masks[:, None]) == 0   # [S, omega]
    parity = np.ones(n, dtype=np.int64)
    for b in range(universe):
        parity *= 1 - 2 * ((masks >> b) & 1)
    tilde_plus = is_subset.astype(np.int64)
    tilde_minus = tilde_plus * parity[None, :]
    xi_plus = tilde_plus.copy()
    xi_plus[:, 0] -= 1
    xi_minus = -(tilde_minus.copy())
    xi_minus[:, 0] += 1

    sizes = np.array([int(m).bit_count() for m in masks], dtype=np.int64)
    inter = np.array([[int(s & t).bit_count() for t in masks] for s in masks],
                     dtype=np.int64)

    failures: list[str] = []

    def check(label, got, want):
        bad = np.argwhere(got != want)
        for idx in bad[:8]:
            failures.append(f"{label} at S=0b{idx[0]:b}" +
                            (f", T=0b{idx[1]:b}" if len(idx) > 1 else ""))

    check("||tilde xi+||^2 = 2^|S|", (tilde_plus * tilde_plus).sum(axis=1), 2 ** sizes)
    check("||tilde xi-||^2 = 2^|S|", (tilde_minus * tilde_minus).sum(axis=1), 2 ** sizes)
    check("||xi+||^2 = 2^|S|-1", (xi_plus * xi_plus).sum(axis=1), 2 ** sizes - 1)
    check("||xi-||^2 = 2^|S|-1", (xi_minus * xi_minus).sum(axis=1), 2 ** sizes - 1)
    # rows of the product are indexed by T (first, conjugate slot), columns by S
    pairing = xi_minus @ xi_plus.T
    check("<xi-_T, xi+_S> = [S n T nonempty]", pairing.T, (inter > 0).astype(np.int64))
    mixed = tilde_minus @ tilde_plus.T
    check("<tilde-, tilde+> = [S n T empty]", mixed.T, (inter == 0).astype(np.int64))
    same = tilde_plus @ tilde_plus.T
    check("<tilde+, tilde+> = 2^|S n T|", same, 2 ** inter)

    return BinomialSuiteReport(
        universe=universe,
        pairs_checked=n * n,
        norm_checks=4 * n,
        passed=not failures,
        failures=tuple(failures),
    )
