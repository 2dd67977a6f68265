"""Randomised invariant families for the lattice and the spectral sequence.

Each family is a function returning a list of failure messages (empty means
pass). Lattice families draw their own random subspaces; complex families
run on a given :class:`~filtspec.complex.FilteredComplex`. The runners tally
pass/fail counts per family and are deterministic in the seed.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from filtspec.complex import FilteredComplex, i_filt, k_filt, make_random, validate
from filtspec.lattice import (
    LatticeError,
    LinearMap,
    Subspace,
    butterfly,
    image,
    induced_map,
    kernel,
    preimage,
    pushforward,
    subquotient,
)
from filtspec import specseq as ss

# ---------------------------------------------------------------------------
# random subspaces and maps
# ---------------------------------------------------------------------------


def random_subspace(rng: np.random.Generator, prime: int, ambient: int, max_rows: int | None = None) -> Subspace:
    k = int(rng.integers(0, (ambient if max_rows is None else max_rows) + 1))
    return Subspace(rng.integers(0, prime, size=(k, ambient)), prime, ambient)


def random_sub(rng: np.random.Generator, s: Subspace) -> Subspace:
    """A random subspace of ``s``."""
    k = int(rng.integers(0, s.dim + 1))
    coef = rng.integers(0, s.prime, size=(k, s.dim))
    return Subspace(np.mod(coef @ s.basis, s.prime), s.prime, s.ambient)


def random_between(rng: np.random.Generator, lo: Subspace, hi: Subspace) -> Subspace:
    """A random subspace ``x`` with ``lo <= x <= hi`` (requires ``lo <= hi``)."""
    return lo + random_sub(rng, hi)


def random_map(rng: np.random.Generator, prime: int, rows: int, cols: int) -> LinearMap:
    # mix full-rank and low-rank maps
    if rng.random() < 0.5 or min(rows, cols) == 0:
        return LinearMap(rng.integers(0, prime, size=(rows, cols)), prime)
    k = int(rng.integers(0, min(rows, cols) + 1))
    left = rng.integers(0, prime, size=(rows, k))
    right = rng.integers(0, prime, size=(k, cols))
    return LinearMap(left @ right, prime)


def represent_differently(rng: np.random.Generator, s: Subspace) -> np.ndarray:
    """Another spanning set of ``s``: an invertible recombination of its basis plus redundant rows."""
    p, k = s.prime, s.dim
    if k == 0:
        return np.zeros((int(rng.integers(0, 3)), s.ambient), dtype=np.int64)
    while True:
        g = rng.integers(0, p, size=(k, k))
        if LinearMap(g, p).is_invertible():
            break
    extra = rng.integers(0, p, size=(int(rng.integers(0, 3)), k))
    return np.mod(np.vstack([g, extra]) @ s.basis, p)


def _q1(a, b, c, d):
    return subquotient(a + (d & b), a + (c & b))


# ---------------------------------------------------------------------------
# lattice families: each takes (rng, prime, ambient) and returns failures
# ---------------------------------------------------------------------------


def check_modular(rng, prime, ambient):
    c = random_subspace(rng, prime, ambient)
    a = random_sub(rng, c)
    b = random_subspace(rng, prime, ambient)
    if a + (b & c) != (a + b) & c:
        return [f"modular law fails for a={a}, b={b}, c={c}"]
    return []


def check_dimension_formula(rng, prime, ambient):
    u, v = random_subspace(rng, prime, ambient), random_subspace(rng, prime, ambient)
    if u.dim + v.dim != (u + v).dim + (u & v).dim:
        return [f"dim formula fails for {u}, {v}"]
    return []


def check_exchange_limit(rng, prime, ambient):
    b = random_subspace(rng, prime, ambient)
    a = random_sub(rng, b)
    top = random_subspace(rng, prime, ambient)
    chain = [top]
    for _ in range(int(rng.integers(0, 5))):
        chain.insert(0, random_sub(rng, chain[0]))
    terms = [a + (c & b) for c in chain]
    union = terms[0]
    meet = terms[0]
    for t in terms[1:]:
        union = union + t
        meet = meet & t
    out = []
    if union != a + (chain[-1] & b):
        out.append("union over chain differs from the top term")
    if meet != a + (chain[0] & b):
        out.append("intersection over chain differs from the bottom term")
    return out


def check_butterfly(rng, prime, ambient):
    b, d = random_subspace(rng, prime, ambient), random_subspace(rng, prime, ambient)
    a, c = random_sub(rng, b), random_sub(rng, d)
    bf = butterfly(a, b, c, d)
    dims = {bf.q1.dim, bf.q2.dim, bf.q3.dim, bf.q4.dim}
    out = []
    if len(dims) != 1:
        out.append(f"butterfly dims differ: {[bf.q1.dim, bf.q2.dim, bf.q3.dim, bf.q4.dim]}")
    if not bf.all_invertible():
        out.append("butterfly connecting map not invertible")
    return out


def _two_spaces(rng, prime, ambient):
    m = int(rng.integers(1, ambient + 1))
    return ambient, m, random_map(rng, prime, m, ambient)


def _surjectivity_data(rng, prime, n, m, f):
    # B and D are drawn freely, so f^-1(B') = B usually fails; only f(B&D) = B'&D' is kept
    def widen(image_of):
        extra = random_subspace(rng, prime, m, 1) if rng.random() < 0.5 else image_of
        return image_of + extra

    for _ in range(50):
        b, d = random_subspace(rng, prime, n), random_subspace(rng, prime, n)
        bp, dp = widen(pushforward(f, b)), widen(pushforward(f, d))
        if pushforward(f, b & d) == bp & dp:
            return b, d, bp, dp
    bp = random_subspace(rng, prime, m)
    d = random_subspace(rng, prime, n)
    return preimage(f, bp), d, bp, pushforward(f, d)


def check_surjectivity(rng, prime, ambient):
    n, m, f = _two_spaces(rng, prime, ambient)
    b, d, bp, dp = _surjectivity_data(rng, prime, n, m, f)
    a, c = random_sub(rng, b), random_sub(rng, d)
    ap = random_between(rng, pushforward(f, a), bp)
    cp = random_between(rng, pushforward(f, c), dp)
    if pushforward(f, b & d) != bp & dp:
        return ["constructed data misses the hypothesis f(B&D) = B'&D'"]
    fhat = induced_map(f, _q1(a, b, c, d), _q1(ap, bp, cp, dp))
    if fhat.rank != fhat.rows:
        return [f"induced map not surjective: rank {fhat.rank} < {fhat.rows}"]
    return []


def check_injectivity(rng, prime, ambient):
    n, m, f = _two_spaces(rng, prime, ambient)
    # ker f goes into A or C, so f^-1(f(A) + f(C)) = A + C without A = f^-1(A') separately
    a, c = random_subspace(rng, prime, n), random_subspace(rng, prime, n)
    if rng.random() < 0.5:
        a = a + kernel(f)
    else:
        c = c + kernel(f)
    ap, cp = pushforward(f, a), pushforward(f, c)
    b = a + random_subspace(rng, prime, n)
    d = c + random_subspace(rng, prime, n)
    bp = pushforward(f, b) + random_subspace(rng, prime, m)
    dp = pushforward(f, d) + random_subspace(rng, prime, m)
    if a + c != preimage(f, ap + cp):
        return ["constructed data misses the hypothesis A+C = f^-1(A'+C')"]
    fhat = induced_map(f, _q1(a, b, c, d), _q1(ap, bp, cp, dp))
    if fhat.rank != fhat.cols:
        return [f"induced map not injective: rank {fhat.rank} < {fhat.cols}"]
    return []


def check_adjointness(rng, prime, ambient):
    n, m, f = _two_spaces(rng, prime, ambient)
    bp = random_subspace(rng, prime, m)
    ap = random_sub(rng, bp)
    d = random_subspace(rng, prime, n)
    c = random_sub(rng, d)
    a, b = preimage(f, ap), preimage(f, bp)
    cp, dp = pushforward(f, c), pushforward(f, d)
    fhat = induced_map(f, _q1(a, b, c, d), _q1(ap, bp, cp, dp))
    if not fhat.is_invertible():
        return [f"induced map of shape {fhat.shape} and rank {fhat.rank} is not an isomorphism"]
    return []


def check_canonical(rng, prime, ambient):
    u, v = random_subspace(rng, prime, ambient), random_subspace(rng, prime, ambient)
    u2 = Subspace(represent_differently(rng, u), prime, ambient)
    v2 = Subspace(represent_differently(rng, v), prime, ambient)
    f = random_map(rng, prime, int(rng.integers(1, ambient + 1)), ambient)
    w = random_subspace(rng, prime, f.rows)
    w2 = Subspace(represent_differently(rng, w), prime, f.rows)
    out = []
    if u2 != u or v2 != v or w2 != w:
        out.append("re-presented subspace not bitwise equal")
    pairs = [
        (u + v, u2 + v2, "sum"),
        (u & v, u2 & v2, "intersect"),
        (pushforward(f, u), pushforward(f, u2), "pushforward"),
        (preimage(f, w), preimage(f, w2), "preimage"),
    ]
    for x, y, name in pairs:
        if not (x == y and np.array_equal(x.basis, y.basis)):
            out.append(f"{name} depends on presentation")
    return out


LATTICE_FAMILIES: "OrderedDict[str, Callable]" = OrderedDict(
    [
        ("modular law", check_modular),
        ("dimension formula", check_dimension_formula),
        ("exchange limit", check_exchange_limit),
        ("butterfly", check_butterfly),
        ("surjectivity criterion", check_surjectivity),
        ("injectivity criterion", check_injectivity),
        ("adjointness", check_adjointness),
        ("canonical form", check_canonical),
    ]
)


# ---------------------------------------------------------------------------
# complex families: each takes a valid FilteredComplex
# ---------------------------------------------------------------------------


def _stages(fc):
    return range(ss.stabilization_index(fc) + 1)


def check_valid(fc):
    return [v.describe() for v in validate(fc).violations]


def check_filtration_limits(fc):
    out = []
    for n in fc.degrees:
        if k_filt(fc, fc.p_min - 1, n) != kernel(fc.d(n)):
            out.append(f"K below the window is not ker d_{n}")
        if i_filt(fc, fc.p_max, n) != image(fc.d(n + 1)):
            out.append(f"I at the top is not im d_{n + 1}")
        if not k_filt(fc, math.inf, n).is_full() or not i_filt(fc, -math.inf, n).is_zero():
            out.append(f"infinite conventions broken at degree {n}")
        for p in range(fc.p_min - 1, fc.p_max + 1):
            if not (k_filt(fc, p, n) <= k_filt(fc, p + 1, n) and i_filt(fc, p, n) <= i_filt(fc, p + 1, n)):
                out.append(f"K or I not monotone at (n={n}, p={p})")
            if not fc.F(p, n) <= k_filt(fc, p, n):
                out.append(f"F_pC not inside F_pK at (n={n}, p={p})")
    return out


def check_sandwich(fc):
    out = []
    for p, q in ss.support(fc):
        n = p + q
        z_inf, b_inf = ss.z_group(fc, p, q, math.inf), ss.b_group(fc, p, q, math.inf)
        for r in _stages(fc):
            chain = [
                fc.F(p - 1, n),
                ss.b_group(fc, p, q, r),
                ss.b_group(fc, p, q, r + 1),
                b_inf,
                z_inf,
                ss.z_group(fc, p, q, r + 1),
                ss.z_group(fc, p, q, r),
                fc.F(p, n),
            ]
            for i, (lo, hi) in enumerate(zip(chain, chain[1:])):
                if not lo <= hi:
                    out.append(f"sandwich link {i} broken at ({p}, {q}), r={r}")
    return out


def check_d_squared(fc):
    out = []
    for r in _stages(fc):
        for p, q in ss.support(fc):
            first = ss.differential(fc, p + r, q - r + 1, r)
            second = ss.differential(fc, p, q, r)
            if not (second @ first).is_zero():
                out.append(f"d^{r} d^{r} != 0 through ({p}, {q})")
    return out


def check_page_turning(fc):
    out = []
    for r in _stages(fc):
        res = ss.turn_page_check(fc, r)
        out.extend(f"r={r}: {w}" for w in res.failures)
    return out


def check_connecting_iso(fc):
    out = []
    for r in _stages(fc):
        for p, q in ss.support(fc):
            src, tgt, iso = ss.connecting_isomorphism(fc, p, q, r)
            tp, tq = p - r, q + r - 1
            if src.z != ss.z_group(fc, p, q, r) or src.b != ss.z_group(fc, p, q, r + 1):
                out.append(f"source is not Z^r/Z^(r+1) at ({p}, {q}), r={r}")
            if tgt.z != ss.b_group(fc, tp, tq, r + 1) or tgt.b != ss.b_group(fc, tp, tq, r):
                out.append(f"target is not B^(r+1)/B^r at ({tp}, {tq}), r={r}")
            if not iso.is_invertible():
                out.append(f"d-induced map not invertible at ({p}, {q}), r={r}")
    return out


def check_euler(fc):
    expected = sum((-1) ** (n % 2) * fc.dim(n) for n in fc.degrees)
    out = []
    for r in list(_stages(fc)) + [math.inf]:
        chi = ss.page(fc, r).euler_characteristic()
        if chi != expected:
            out.append(f"Euler characteristic {chi} on page {r}, expected {expected}")
    return out


def check_stability(fc):
    out = []
    rs = ss.stabilization_index(fc)
    base = ss.page(fc, rs)
    for r in range(rs, rs + 4):
        pg = ss.page(fc, r)
        for key, e in pg.entries.items():
            if not e.entry.same_as(base.entries[key].entry):
                out.append(f"page {r} differs from page {rs} at {key}")
            if not e.entry.same_as(ss.infinity_entry(fc, *key).entry):
                out.append(f"page {r} differs from E^inf at {key}")
        if pg.nonzero_differentials():
            out.append(f"nonzero differential on page {r} >= r_stab")
    return out


def check_e0(fc):
    out = []
    for p, q in ss.support(fc):
        n = p + q
        e = ss.page_entry(fc, p, q, 0)
        if e.z != fc.F(p, n) or e.b != fc.F(p - 1, n):
            out.append(f"E^0 at ({p}, {q}) is not F_p/F_(p-1)")
            continue
        graded = ss.page_entry(fc, p, q - 1, 0).entry
        if ss.differential(fc, p, q, 0) != induced_map(fc.d(n), e.entry, graded):
            out.append(f"d^0 at ({p}, {q}) is not induced by d")
    return out


def check_e1(fc):
    out = []
    for p, q in ss.support(fc):
        d_out = ss.differential(fc, p, q, 0)
        d_in = ss.differential(fc, p, q + 1, 0)
        expected = d_out.cols - d_out.rank - d_in.rank
        got = ss.page_entry(fc, p, q, 1).dim
        if got != expected:
            out.append(f"E^1 at ({p}, {q}) has dim {got}, graded homology has {expected}")
    return out


def check_well_defined(fc, seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for r in _stages(fc):
        for p, q in ss.support(fc):
            if ss.differential(fc, p, q, r, rng=rng) != ss.differential(fc, p, q, r):
                out.append(f"d^{r} at ({p}, {q}) depends on the decomposition")
    return out


def check_convergence(fc):
    return list(ss.convergence_report(fc).failures)


COMPLEX_FAMILIES: "OrderedDict[str, Callable]" = OrderedDict(
    [
        ("validation", check_valid),
        ("filtration limits", check_filtration_limits),
        ("sandwich", check_sandwich),
        ("d^r d^r = 0", check_d_squared),
        ("page turning", check_page_turning),
        ("d-induced isomorphism", check_connecting_iso),
        ("euler characteristic", check_euler),
        ("stability", check_stability),
        ("E^0 identity", check_e0),
        ("E^1 identity", check_e1),
        ("well-defined d^r", check_well_defined),
        ("convergence", check_convergence),
    ]
)


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------


@dataclass
class Tally:
    passed: int = 0
    failed: int = 0
    examples: list[str] = field(default_factory=list)

    def record(self, failures: list[str], label: str) -> None:
        if failures:
            self.failed += 1
            if len(self.examples) < 3:
                self.examples.append(f"{label}: {failures[0]}")
        else:
            self.passed += 1


def _run_one(fn, args, label, tally):
    try:
        failures = fn(*args)
    except (LatticeError, ss.SpectralSequenceError) as exc:
        failures = [f"raised {type(exc).__name__}: {exc}"]
    tally.record(failures, label)


def run_lattice_suite(
    trials: int,
    seed: int,
    primes: Iterable[int] = (2, 3, 5),
    max_ambient: int = 6,
    families: Iterable[str] | None = None,
) -> "OrderedDict[str, Tally]":
    """Run ``trials`` random cases of every lattice family; primes cycle case by case."""
    primes = tuple(primes)
    out: OrderedDict[str, Tally] = OrderedDict()
    for k, (name, fn) in enumerate(LATTICE_FAMILIES.items()):
        if families is not None and name not in families:
            continue
        rng = np.random.default_rng([seed, k])
        tally = out[name] = Tally()
        for i in range(trials):
            prime = primes[i % len(primes)]
            ambient = int(rng.integers(1, max_ambient + 1))
            _run_one(fn, (rng, prime, ambient), f"case {i} (p={prime}, n={ambient})", tally)
    return out


def random_complexes(trials: int, seed: int, primes: Iterable[int], max_dim: int, p_range: int):
    primes = tuple(primes)
    seeds = np.random.default_rng(seed).integers(0, 2**31 - 1, size=trials)
    for i, s in enumerate(seeds):
        yield make_random(primes[i % len(primes)], max_dim, p_range, int(s))


def run_complex_suite(
    complexes: Iterable[FilteredComplex], families: Iterable[str] | None = None
) -> "OrderedDict[str, Tally]":
    out: OrderedDict[str, Tally] = OrderedDict(
        (name, Tally()) for name in COMPLEX_FAMILIES if families is None or name in families
    )
    for i, fc in enumerate(complexes):
        for name in out:
            _run_one(COMPLEX_FAMILIES[name], (fc,), f"complex {i}", out[name])
    return out


def all_passed(*tallies: "OrderedDict[str, Tally]") -> bool:
    return all(t.failed == 0 for group in tallies for t in group.values())
