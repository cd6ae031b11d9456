"""Equivalence of ordered prime tuples.

A k-tuple of distinct primes (p_1, ..., p_k) names a candidate edge path:
starting values n must satisfy p_i | p_1...p_{i-1} n + 1 for every i. The
admissible n form one invertible residue class modulo the tuple's product,
and two orderings of the same primes are interchangeable as paths exactly
when their residue classes coincide. That residue-class criterion is the
working definition of equivalence here; the permutation-congruence form is
kept in the test suite as an independent oracle.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, prod
from typing import Iterable, Sequence, Union

from .arith import crt, is_prime, mod_inverse

MAX_FACTORIAL_K = 10


class TupleTooLong(ValueError):
    """Raised when a factorial-cost operation is asked for k > 10."""


@dataclass(frozen=True, order=True)
class PrimeTuple:
    """Ordered tuple of distinct primes."""

    primes: tuple[int, ...]

    def __post_init__(self) -> None:
        ps = self.primes
        if len(set(ps)) != len(ps):
            raise ValueError("entries must be distinct")
        for p in ps:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")

    @property
    def k(self) -> int:
        return len(self.primes)

    @cached_property
    def modulus(self) -> int:
        return prod(self.primes)

    def prefix_products(self) -> list[int]:
        """Products p_1...p_i for i = 0..k (starts at the empty product 1)."""
        out = [1]
        for p in self.primes:
            out.append(out[-1] * p)
        return out

    def __iter__(self):
        return iter(self.primes)

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.primes) + ")"


TupleLike = Union[PrimeTuple, Sequence[int]]


def _entries(P: TupleLike) -> tuple[int, ...]:
    return P.primes if isinstance(P, PrimeTuple) else tuple(P)


@dataclass(frozen=True)
class ResidueClass:
    """An invertible residue a modulo m."""

    a: int
    m: int

    def __post_init__(self) -> None:
        if not 0 <= self.a < self.m:
            raise ValueError("residue not reduced")
        if gcd(self.a, self.m) != 1:
            raise ValueError("residue not invertible")

    def __str__(self) -> str:
        return f"{self.a} mod {self.m}"


@dataclass(frozen=True)
class Permutation:
    """Bijection on positions 0..k-1; images[i] is where entry i lands."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError("not a bijection")

    @property
    def k(self) -> int:
        return len(self.images)

    @property
    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.images))

    def apply(self, seq: Sequence) -> tuple:
        """Rearrange seq so entry i moves to position images[i]."""
        out = [None] * len(self.images)
        for i, j in enumerate(self.images):
            out[j] = seq[i]
        return tuple(out)

    def inverse(self) -> "Permutation":
        inv = [0] * self.k
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    @staticmethod
    def reversal(k: int) -> "Permutation":
        return Permutation(tuple(range(k - 1, -1, -1)))

    @staticmethod
    def transposition(k: int, i: int, j: int) -> "Permutation":
        images = list(range(k))
        images[i], images[j] = j, i
        return Permutation(tuple(images))


def residue_base(primes: Iterable[int]) -> int:
    """Least nonnegative n with p_i | p_1...p_{i-1} n + 1 for every i."""
    a, M = 0, 1
    for p in primes:
        r = -mod_inverse(M, p) % p
        t = (r - a) * pow(M, -1, p) % p
        a += M * t
        M *= p
    return a


def residue_class(P: TupleLike) -> ResidueClass:
    """The arithmetic progression of starting values admitting path P."""
    ps = _entries(P)
    congruences = []
    M = 1
    for p in ps:
        congruences.append((-mod_inverse(M, p) % p, p))
        M *= p
    a, m = crt(congruences)
    return ResidueClass(a, m)


def equivalent(P: TupleLike, Q: TupleLike) -> bool:
    """True when P and Q are orderings of one prime set with equal classes."""
    ps, qs = _entries(P), _entries(Q)
    if sorted(ps) != sorted(qs):
        return False
    return residue_base(ps) == residue_base(qs)


def reverse(P: PrimeTuple) -> PrimeTuple:
    return PrimeTuple(tuple(reversed(_entries(P))))


def _check_k(k: int) -> None:
    if k > MAX_FACTORIAL_K:
        raise TupleTooLong(f"k = {k} exceeds the factorial-search limit")


def multiplicity(P: TupleLike) -> int:
    """Number of orderings of P's primes sharing P's residue class."""
    ps = _entries(P)
    _check_k(len(ps))
    target = residue_base(ps)
    return sum(1 for q in itertools.permutations(ps)
               if residue_base(q) == target)


def equivalence_class(P: TupleLike) -> list[PrimeTuple]:
    """All orderings equivalent to P, including P itself, sorted."""
    ps = _entries(P)
    _check_k(len(ps))
    target = residue_base(ps)
    out = [PrimeTuple(q) for q in itertools.permutations(ps)
           if residue_base(q) == target]
    out.sort()
    return out


def is_irreducible_pair(P: TupleLike, Q: TupleLike) -> bool:
    """Two equivalent distinct orderings whose proper prefix products differ.

    Such a pair forms a loop meeting only at its endpoints.
    """
    ps, qs = _entries(P), _entries(Q)
    if ps == qs or len(ps) != len(qs):
        return False
    if not equivalent(ps, qs):
        return False
    pp = qq = 1
    for i in range(len(ps) - 1):
        pp *= ps[i]
        qq *= qs[i]
        if pp == qq:
            return False
    return True


@dataclass(frozen=True)
class PairRecord:
    """An unordered equivalent pair of orderings, canonically arranged.

    ``residues`` lists the residue class shared by the two sides; ``kind``
    tags the structural family (triple, quadruple-case-I..IV, general).
    """

    p: PrimeTuple
    q: PrimeTuple
    residues: tuple[ResidueClass, ...] = field(default=())
    kind: str = "general"

    def __post_init__(self) -> None:
        if self.p.primes > self.q.primes:
            lo, hi = self.q, self.p
            object.__setattr__(self, "p", lo)
            object.__setattr__(self, "q", hi)
        if not self.residues:
            rc = residue_class(self.p)
            object.__setattr__(self, "residues", (rc,))

    @property
    def modulus(self) -> int:
        return self.p.modulus

    @property
    def irreducible(self) -> bool:
        return is_irreducible_pair(self.p, self.q)

    def to_json_obj(self) -> dict:
        return {
            "p": [str(v) for v in self.p.primes],
            "q": [str(v) for v in self.q.primes],
            "modulus": str(self.modulus),
            "residues": [str(rc.a) for rc in self.residues],
            "kind": self.kind,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True,
                          separators=(",", ":"))

    @staticmethod
    def from_json_obj(obj: dict) -> "PairRecord":
        p = PrimeTuple(tuple(int(v) for v in obj["p"]))
        q = PrimeTuple(tuple(int(v) for v in obj["q"]))
        m = int(obj["modulus"])
        residues = tuple(ResidueClass(int(a), m) for a in obj["residues"])
        return PairRecord(p, q, residues, obj.get("kind", "general"))

    @staticmethod
    def from_json_line(line: str) -> "PairRecord":
        return PairRecord.from_json_obj(json.loads(line))


def make_pair(P: TupleLike, Q: TupleLike, kind: str = "general") -> PairRecord:
    """Build the canonical record for an unordered pair of orderings."""
    return PairRecord(PrimeTuple(_entries(P)), PrimeTuple(_entries(Q)),
                      kind=kind)
