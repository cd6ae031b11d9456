"""Closed-form classification and generation of loop tuples.

Triples with two orderings of the same residue class satisfy a pair of
congruences that reduce to the integer system

    p3 - p1 = q * p2,        p2 * (p1 + p3) = 1 + r * p1 * p3,

whose solutions are generated exactly by four parametric families built
from Fibonacci polynomials. Quadruples fall into four congruence cases.
Larger tuples arise by grouping primes into blocks and lifting a block
level equivalence, which is also how the two stock polynomial families
f(x) and g(x) produce irreducible pairs of unbounded length.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, prod
from typing import Iterator, Optional, Sequence

from .arith import DEFAULT_POLICY, EffortPolicy, NotSquarefree, factor, is_prime
from .tuples import PairRecord, Permutation, PrimeTuple, make_pair


class BlockCongruenceFailed(ValueError):
    """Raised when a block tuple fails the lifting congruences."""


@dataclass(frozen=True)
class TripleWitness:
    """Integer multipliers certifying the triple system."""

    q: int
    r: int


@dataclass(frozen=True)
class ParametricLine:
    """One member of the four-family parametrization of integer triples."""

    line: int
    n: int = 0
    x: int = 0
    delta: int = 1

    def __post_init__(self) -> None:
        if self.line not in (1, 2, 3, 4):
            raise ValueError("line must be 1..4")
        if self.delta not in (-1, 1):
            raise ValueError("delta must be +-1")


@dataclass(frozen=True)
class QuadrupleCase:
    """Case tag plus the equivalence classes the conditions give rise to."""

    case: str
    classes: tuple[tuple[tuple[int, ...], ...], ...]


@dataclass(frozen=True)
class BlockTuple:
    """Integers > 1 with a chosen ordering of each one's prime factors."""

    blocks: tuple[int, ...]
    orderings: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_blocks(blocks: Sequence[int],
                    policy: EffortPolicy = DEFAULT_POLICY) -> "BlockTuple":
        """Factor each block and order its primes ascending."""
        orderings = []
        for b in blocks:
            fz = factor(b, policy)
            expanded: list[int] = []
            for p, e in fz.factors:
                expanded.extend([p] * e)
            if not fz.complete:
                raise ValueError(f"could not factor block {b}")
            orderings.append(tuple(expanded))
        return BlockTuple(tuple(blocks), tuple(orderings))


def is_multiple_triple(p1: int, p2: int, p3: int) -> bool:
    """Whether (p1, p2, p3) admits a second ordering with the same class.

    The criterion: p2(p1 + p3) = 1 mod p1*p3 and p1 = p3 mod p2, in which
    case the only partner ordering is the reversal.
    """
    return (p2 * (p1 + p3) - 1) % (p1 * p3) == 0 and (p1 - p3) % p2 == 0


_CASE_CLASSES = {
    "I": lambda a, b, c, d: (((a, b, c, d), (d, a, c, b)),
                             ((d, c, b, a), (b, c, a, d))),
    "II": lambda a, b, c, d: (((a, b, c, d), (d, c, a, b)),
                              ((d, c, b, a), (b, a, c, d))),
    "III": lambda a, b, c, d: (((a, b, c, d), (d, b, c, a)),
                               ((d, c, b, a), (a, c, b, d))),
    "IV": lambda a, b, c, d: (((a, b, c, d), (d, c, b, a)),),
}


def _case_conditions(case: str, a: int, b: int, c: int, d: int) -> bool:
    if case == "I":
        return ((d - 1) % a == 0
                and (c * (a * b + d) - 1) % (b * d) == 0
                and (b - d) % c == 0)
    if case == "II":
        return ((c * (a * b + d) - 1) % (a * b * d) == 0
                and (a * b - d) % c == 0)
    if case == "III":
        return (((a + d) * b * c - 1) % (a * d) == 0
                and (a - d) % (b * c) == 0)
    if case == "IV":
        return (((a + d) * b * c - 1) % (a * d) == 0
                and (a - c * d) % b == 0
                and (a * b - d) % c == 0)
    raise ValueError(case)


def _case_normalized(case: str, a: int, b: int, c: int, d: int) -> bool:
    """Each case's symmetry group leaves its congruences invariant; these
    inequalities pick one representative per solution set."""
    if case == "II":
        return a < b
    if case == "III":
        return a < d and b < c
    if case == "IV":
        return a < d
    return True


def quadruple_case(p1: int, p2: int, p3: int, p4: int
                   ) -> Optional[QuadrupleCase]:
    """Match (p1..p4) against the four quadruple congruence systems.

    Returns the unique matching case with its equivalence classes, or
    None. A single tuple can satisfy at most one system, since two would
    force more than two orderings into one residue class. The inequality
    normalizations are only a counting device (a system invariant under
    reversal is satisfied by both orderings of the one class it yields),
    so they do not reject input here.
    """
    for case in ("I", "II", "III", "IV"):
        if _case_conditions(case, p1, p2, p3, p4):
            return QuadrupleCase(case, _CASE_CLASSES[case](p1, p2, p3, p4))
    return None


def quadruple_case_of_pair(P: Sequence[int], Q: Sequence[int]) -> Optional[str]:
    """Case tag of an irreducible quadruple pair, scanning orderings."""
    pair = {tuple(P), tuple(Q)}
    for T in itertools.permutations(sorted(P)):
        qc = quadruple_case(*T)
        if qc is None:
            continue
        for cls in qc.classes:
            if set(cls) == pair:
                return qc.case
    return None


def fib_poly(n: int, x: int) -> int:
    """Fibonacci polynomial F_n at integer x, any sign of n."""
    if n < 0:
        v = fib_poly(-n, x)
        return v if n % 2 else -v
    a, b = 0, 1
    for _ in range(n):
        a, b = b, x * b + a
    return a


def lucas_poly(n: int, x: int) -> int:
    """Lucas polynomial L_n = F_{n+1} + F_{n-1} at integer x."""
    return fib_poly(n + 1, x) + fib_poly(n - 1, x)


def _witness_of(p1: int, p2: int, p3: int) -> Optional[TripleWitness]:
    if p2 != 0:
        if (p3 - p1) % p2:
            return None
        q = (p3 - p1) // p2
    else:
        if p3 != p1:
            return None
        q = 0
    t = p2 * (p1 + p3) - 1
    if p1 * p3 != 0:
        if t % (p1 * p3):
            return None
        r = t // (p1 * p3)
    else:
        if t != 0:
            return None
        r = 0
    return TripleWitness(q, r)


def _evaluate_line(line: int, n: int, x: int, delta: int
                   ) -> tuple[int, int, int]:
    if line == 1:
        f0, f1, f2 = fib_poly(n - 1, x), fib_poly(n, x), fib_poly(n + 1, x)
        fm = fib_poly(-n, x)
        t = (f0 + f1, fm, f1 + f2)
    elif line == 2:
        t = (fib_poly(n, x), fib_poly(-n, x) + fib_poly(-(n + 1), x),
             fib_poly(n + 1, x))
    elif line == 3:
        t = (1, x, 1)
    else:
        t = (x, 1, 1 - x)
    return (delta * t[0], delta * t[1], delta * t[2])


def parametric_triple(p: ParametricLine
                      ) -> tuple[tuple[int, int, int], TripleWitness]:
    """Evaluate one parametric line exactly, with its certifying witness."""
    t = _evaluate_line(p.line, p.n, p.x, p.delta)
    w = _witness_of(*t)
    if w is None:
        raise AssertionError(f"parametric output {t} fails the triple system")
    return t, w


# Families whose entries are at most linear in x get solved directly:
# (line, n) -> closed forms, so classification never scans a long x range.
_LINEAR_FAMILIES = (
    (1, 0), (1, 1), (1, -1),
    (2, 0), (2, 1), (2, -1), (2, -2),
)


def _linear_matches(t: tuple[int, int, int]) -> list[ParametricLine]:
    out = []
    for delta in (1, -1):
        u = (t[0] * delta, t[1] * delta, t[2] * delta)
        if u[0] == 1 and u[2] == 1:
            out.append(ParametricLine(3, 0, u[1], delta))
        if u[1] == 1 and u[0] + u[2] == 1:
            out.append(ParametricLine(4, 0, u[0], delta))
        for line, n in _LINEAR_FAMILIES:
            probe = _evaluate_line(line, n, 0, 1)
            grad = tuple(b - a for a, b in
                         zip(probe, _evaluate_line(line, n, 1, 1)))
            # solve probe + x*grad == u
            x = None
            ok = True
            for base, g, target in zip(probe, grad, u):
                if g == 0:
                    ok = ok and base == target
                else:
                    if (target - base) % g:
                        ok = False
                    else:
                        xi = (target - base) // g
                        ok = ok and (x is None or x == xi)
                        x = xi
            if ok and x is not None:
                out.append(ParametricLine(line, n, x, delta))
    return out


@lru_cache(maxsize=8)
def _scan_table(bound: int) -> dict[tuple[int, int, int],
                                    tuple[ParametricLine, ...]]:
    """All nonlinear-family outputs with every entry in [-bound, bound]."""
    table: dict[tuple[int, int, int], list[ParametricLine]] = {}
    for line in (1, 2):
        n_abs = 2
        while fib_poly(n_abs, 1) <= bound:
            for n in {n_abs, -n_abs}:
                if (line, n) in _LINEAR_FAMILIES:
                    continue
                x = 1
                while True:
                    hit = False
                    for sx in (x, -x):
                        for delta in (1, -1):
                            t = _evaluate_line(line, n, sx, delta)
                            if max(abs(v) for v in t) <= bound:
                                hit = True
                                table.setdefault(t, []).append(
                                    ParametricLine(line, n, sx, delta))
                    if not hit:
                        # entry magnitudes grow with |x| here, so done
                        break
                    x += 1
            n_abs += 1
    return {k: tuple(v) for k, v in table.items()}


def classify_integer_triple(p1: int, p2: int, p3: int
                            ) -> Optional[tuple[TripleWitness,
                                                list[ParametricLine]]]:
    """Witness and parametric representations of an integer triple.

    Returns None when the triple system has no integer multipliers;
    otherwise the witness together with every representation found by
    direct solution of the linear families plus a bounded scan of the
    growing ones.
    """
    w = _witness_of(p1, p2, p3)
    if w is None:
        return None
    t = (p1, p2, p3)
    bound = max(abs(p1), abs(p2), abs(p3), 1)
    lines = _linear_matches(t) + list(_scan_table(bound).get(t, ()))
    seen = []
    for ln in lines:
        if ln not in seen:
            seen.append(ln)
    return w, seen


def generate_prime_triples(x_max: int) -> Iterator[PairRecord]:
    """Prime outputs of the cubic-family triple for x = 1..x_max.

    Each hit is emitted as the irreducible pair formed with its reversal.
    """
    for x in range(1, x_max + 1):
        t = (x * x + x + 1, x * x + 1, x ** 3 + x * x + 2 * x + 1)
        if all(is_prime(v) for v in t):
            yield make_pair(t, tuple(reversed(t)), kind="triple")


def _block_prefix(values: Sequence[int], i: int) -> int:
    return prod(values[:i]) if i else 1


def embed(b: BlockTuple, pi: Permutation) -> tuple[PrimeTuple, PrimeTuple]:
    """Lift a block-level equivalence to the full prime tuple.

    The blocks' concatenated orderings form P; the returned partner is
    the block-permuted arrangement, equivalent to P by construction.
    """
    blocks, orderings = b.blocks, b.orderings
    k = len(blocks)
    if pi.k != k:
        raise ValueError("permutation size does not match block count")
    if pi.is_identity:
        raise ValueError("permutation must be non-trivial")
    flat: list[int] = []
    for block, ordering in zip(blocks, orderings):
        if block <= 1:
            raise ValueError("blocks must exceed 1")
        if prod(ordering) != block or not all(is_prime(p) for p in ordering):
            raise NotSquarefree(
                f"ordering {ordering} is not a squarefree split of {block}")
        flat.extend(ordering)
    if len(set(flat)) != len(flat):
        raise NotSquarefree("blocks share a prime factor")

    q_blocks = pi.apply(blocks)
    for i in range(k):
        lhs = _block_prefix(blocks, i)
        rhs = _block_prefix(q_blocks, pi.images[i])
        if (lhs - rhs) % blocks[i]:
            raise BlockCongruenceFailed(
                f"block congruence fails at position {i + 1}")

    sizes = [len(o) for o in orderings]
    inv = pi.inverse().images
    s = [0] * (k + 1)
    t = [0] * (k + 1)
    for i in range(k):
        s[i + 1] = s[i] + sizes[i]
        t[i + 1] = t[i] + sizes[inv[i]]
    images = [0] * len(flat)
    for i in range(k):
        for j in range(sizes[i]):
            images[s[i] + j] = t[pi.images[i]] + j
    big = Permutation(tuple(images))
    P = tuple(flat)
    return PrimeTuple(P), PrimeTuple(big.apply(P))


def _kind_for(P: Sequence[int], Q: Sequence[int]) -> str:
    k = len(P)
    if k == 3:
        return "triple"
    if k == 4:
        tag = quadruple_case_of_pair(P, Q)
        if tag is not None:
            return f"quadruple-case-{tag}"
    return "general"


def _swap_ends(k: int) -> Permutation:
    return Permutation.transposition(k, 0, k - 1)


def manypairs_generator(q: int, x_max: int, mode: str = "A",
                        policy: EffortPolicy = DEFAULT_POLICY,
                        ) -> Iterator[PairRecord]:
    """Irreducible pairs from the stock polynomial families.

    Mode A walks f(x) = (x^2+x+1)(x^2+1)(x^3+x^2+2x+1), keeping x with
    f(x) squarefree and coprime to q. Mode B walks g(x) = x(x^2-x+1)(x^2+1),
    keeping x with gcd(g(x), q^2) = q and g(x)/q squarefree, so every
    emitted modulus is divisible by q.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if mode not in ("A", "B"):
        raise ValueError("mode must be 'A' or 'B'")
    for x in range(1, x_max + 1):
        if mode == "A":
            blocks = (x * x + x + 1, x * x + 1, x ** 3 + x * x + 2 * x + 1)
            value = prod(blocks)
            if gcd(value, q) != 1:
                continue
        else:
            blocks = (x, x * x - x + 1, x * x + 1)
            value = prod(blocks)
            if gcd(value, q * q) != q:
                continue
        if any(b <= 1 for b in blocks):
            continue
        try:
            bt = BlockTuple.from_blocks(blocks, policy)
            P, Q = embed(bt, _swap_ends(3))
        except (NotSquarefree, ValueError):
            continue
        rec = make_pair(P.primes, Q.primes, kind=_kind_for(P.primes, Q.primes))
        if not rec.irreducible:
            continue
        yield rec
