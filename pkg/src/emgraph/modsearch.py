"""Exhaustive discovery of equivalent tuple pairs of bounded modulus.

For a fixed squarefree modulus m, two orderings P and Q of its primes sit
in one residue class exactly when each position i has

    p_1 ... p_{i-1} = d_i  (mod p_i)

for the divisor d_i of m equal to the appropriate prefix product of Q.
The k values d_i are distinct proper divisors of m, pairwise comparable
under divisibility, and consecutive elements of the sorted divisor chain
differ by exactly the prime assigned alongside the smaller element. The
search walks positions 1..k, extending the chain one divisor at a time
and pruning on those local rules, which kills most branches immediately.

A permutation-enumeration oracle is provided for cross-checking, plus a
density report for the expected spacing of loop bases.
"""

from __future__ import annotations

import itertools
import multiprocessing
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator, Optional, Sequence, Union

from .arith import Factorization, NotSquarefree, squarefree_stream
from .classify import quadruple_case_of_pair
from .tuples import PairRecord, PrimeTuple, ResidueClass, residue_base


class IncompleteFactorization(ValueError):
    """Raised when a search needs a fully factored modulus."""


class TooManyFactors(ValueError):
    """Raised when brute-force enumeration would be factorially large."""


MAX_BRUTE_OMEGA = 8
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SearchConfig:
    """Parameters for a range search over moduli."""

    lo: int
    hi: int
    min_k: int = 3
    coprime_to: int = 1
    irreducible_only: bool = True
    worker_count: int = 1

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("lo must not exceed hi")
        if self.min_k < 3:
            raise ValueError("min_k must be >= 3: shorter tuples admit "
                             "no second ordering")
        if self.coprime_to < 1 or self.worker_count < 1:
            raise ValueError("coprime_to and worker_count must be positive")


@dataclass(frozen=True)
class DensityReport:
    """Expected node spacing between loop bases of one modulus."""

    modulus: int
    class_count: int
    inverse_density: Union[int, Fraction]


def _pair_search(m: int, primes: Sequence[int],
                 irreducible_only: bool) -> list[tuple[tuple[int, ...],
                                                       tuple[int, ...]]]:
    """Core backtracking search; returns canonical (P, Q) tuples."""
    k = len(primes)
    if k < 3:
        return []
    full = (1 << k) - 1
    # value of every divisor, indexed by prime-subset mask
    value = [1] * (1 << k)
    for b in range(k):
        bit = 1 << b
        p = primes[b]
        for mask in range(bit):
            value[mask | bit] = value[mask] * p

    # chain entries (divisor, mask, assigned prime bit); virtual top last
    chain: list[tuple[int, int, int]] = [(m, full, -1)]
    p_order: list[tuple[int, int, int]] = []  # entries in position order
    found: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()

    def emit() -> None:
        P = tuple(primes[e[2]] for e in p_order)
        # the partner reads the assigned primes off the sorted chain
        Q = tuple(primes[e[2]] for e in chain[:-1])
        if P == Q:
            return
        if irreducible_only:
            pp = qq = 1
            for i in range(k - 1):
                pp *= P[i]
                qq *= Q[i]
                if pp == qq:
                    return
        found.add((P, Q) if P <= Q else (Q, P))

    def descend(idx: int, d: int, dm: int, pbits: int,
                pos: int, prefix: int, used: int) -> None:
        # try every admissible prime for divisor d inserted at chain[idx]
        t = prefix - d
        if t and gcd(t, value[pbits]) == 1:
            return
        while pbits:
            pb = pbits & -pbits
            pbits ^= pb
            b = pb.bit_length() - 1
            if t % primes[b] == 0:
                entry = (d, dm, b)
                chain.insert(idx, entry)
                p_order.append(entry)
                step(pos + 1, prefix * primes[b], used | pb)
                p_order.pop()
                del chain[idx]

    def step(pos: int, prefix: int, used: int) -> None:
        if pos == k:
            emit()
            return
        low = chain[0]
        lo_mask = low[1]
        if lo_mask:
            # gap below the current minimum: new adjacency (d, low) wants
            # a prime dividing low/d, except under the virtual top
            lo_pb = (full if low[2] < 0 else lo_mask) & ~used
            sub = lo_mask
            while True:
                sub = (sub - 1) & lo_mask
                if not irreducible_only or value[sub] != prefix:
                    pbits = lo_pb & ~sub
                    if pbits:
                        descend(0, value[sub], sub, pbits, pos, prefix, used)
                if sub == 0:
                    break
        for idx in range(len(chain) - 1):
            below = chain[idx]
            above = chain[idx + 1]
            step_mask = below[1] | (1 << below[2])
            step_val = value[step_mask]
            if step_val == above[0]:
                continue  # tight adjacency, nothing fits between
            span = above[1] & ~step_mask
            ab_pb = (full if above[2] < 0 else above[1]) & ~used
            # d = step_val * divisor(span submask), strictly below above
            sub = span
            while True:
                sub = (sub - 1) & span
                d = step_val * value[sub]
                if not irreducible_only or d != prefix:
                    dm = step_mask | sub
                    pbits = ab_pb & ~dm
                    if pbits:
                        descend(idx + 1, d, dm, pbits, pos, prefix, used)
                if sub == 0:
                    break

    step(0, 1, 0)
    return sorted(found)


def _records_for(m: int, pairs: list[tuple[tuple[int, ...], tuple[int, ...]]],
                 ) -> list[PairRecord]:
    out = []
    for P, Q in pairs:
        a = residue_base(P)
        kind = "general"
        if len(P) == 3:
            kind = "triple"
        elif len(P) == 4:
            tag = quadruple_case_of_pair(P, Q)
            if tag is not None:
                kind = f"quadruple-case-{tag}"
        rec = PairRecord(PrimeTuple(P), PrimeTuple(Q),
                         (ResidueClass(a, m),), kind)
        out.append(rec)
    out.sort(key=lambda r: (r.residues[0].a, r.p.primes))
    return out


def _require_squarefree(m: int, fz: Factorization) -> tuple[int, ...]:
    if not fz.complete:
        raise IncompleteFactorization(f"{m} has an unfactored cofactor")
    if any(e > 1 for _, e in fz.factors):
        raise NotSquarefree(f"{m} is not squarefree")
    if fz.n != m:
        raise ValueError("factorization does not match modulus")
    return fz.primes


def search_modulus(m: int, fz: Factorization,
                   irreducible_only: bool = True) -> list[PairRecord]:
    """Every unordered pair {P, Q} of equivalent distinct orderings of m.

    Records are deduplicated canonically and each carries the pair's
    residue class. With ``irreducible_only`` the proper prefix products
    must differ throughout, i.e. only genuine loops are kept.
    """
    primes = _require_squarefree(m, fz)
    return _records_for(m, _pair_search(m, primes, irreducible_only))


def brute_force_pairs(m: int, fz: Factorization,
                      irreducible_only: bool = False) -> list[PairRecord]:
    """Ground-truth oracle: group all orderings by residue class.

    Factorially expensive, so limited to omega <= 8.
    """
    primes = _require_squarefree(m, fz)
    if len(primes) > MAX_BRUTE_OMEGA:
        raise TooManyFactors(f"omega({m}) exceeds {MAX_BRUTE_OMEGA}")
    groups: dict[int, list[tuple[int, ...]]] = {}
    for perm in itertools.permutations(primes):
        groups.setdefault(residue_base(perm), []).append(perm)
    pairs = []
    for members in groups.values():
        if len(members) < 2:
            continue
        for P, Q in itertools.combinations(sorted(members), 2):
            if irreducible_only:
                pp = qq = 1
                bad = False
                for i in range(len(P) - 1):
                    pp *= P[i]
                    qq *= Q[i]
                    if pp == qq:
                        bad = True
                        break
                if bad:
                    continue
            pairs.append((P, Q))
    return _records_for(m, sorted(pairs))


def density_report(records: Sequence[PairRecord]) -> DensityReport:
    """phi(modulus) over the number of distinct residue classes."""
    if not records:
        raise ValueError("need at least one record")
    m = records[0].modulus
    if any(r.modulus != m for r in records):
        raise ValueError("records must share one modulus")
    classes = {rc.a for r in records for rc in r.residues}
    phi = 1
    for p in records[0].p.primes:
        phi *= p - 1
    ratio = Fraction(phi, len(classes))
    inv = int(ratio) if ratio.denominator == 1 else ratio
    return DensityReport(m, len(classes), inv)


def _search_chunk(args: tuple[int, int, int, int, bool]) -> list[PairRecord]:
    lo, hi, min_k, coprime_to, irreducible_only = args
    out: list[PairRecord] = []
    for m, fz in squarefree_stream(lo, hi, min_k, coprime_to):
        pairs = _pair_search(m, fz.primes, irreducible_only)
        if pairs:
            out.extend(_records_for(m, pairs))
    return out


def read_checkpoint(path: str) -> Optional[tuple[int, int]]:
    """(last fully processed modulus, records emitted so far), if any."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read().split()
    except FileNotFoundError:
        return None
    if len(text) < 2:
        return None
    return int(text[0]), int(text[1])


def _write_checkpoint(path: str, last: int, count: int) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(f"{last} {count}\n")
    os.replace(tmp, path)


def search_range(cfg: SearchConfig,
                 checkpoint: Optional[str] = None) -> Iterator[PairRecord]:
    """Stream every pair record with modulus in [cfg.lo, cfg.hi], in order.

    The range is cut into fixed chunks processed left to right, so output
    is identical for any worker count; the checkpoint file records the
    last fully emitted chunk boundary for restarts.
    """
    lo = cfg.lo
    emitted = 0
    if checkpoint is not None:
        state = read_checkpoint(checkpoint)
        if state is not None and state[0] >= lo:
            lo = state[0] + 1
            emitted = state[1]
    if lo > cfg.hi:
        return
    chunks = []
    start = lo
    while start <= cfg.hi:
        end = min(start + _CHUNK - 1, cfg.hi)
        chunks.append((start, end, cfg.min_k, cfg.coprime_to,
                       cfg.irreducible_only))
        start = end + 1

    if cfg.worker_count == 1:
        batches = map(_search_chunk, chunks)
        for chunk, recs in zip(chunks, batches):
            yield from recs
            emitted += len(recs)
            if checkpoint is not None:
                _write_checkpoint(checkpoint, chunk[1], emitted)
    else:
        with multiprocessing.Pool(cfg.worker_count) as pool:
            for chunk, recs in zip(chunks, pool.imap(_search_chunk, chunks)):
                yield from recs
                emitted += len(recs)
                if checkpoint is not None:
                    _write_checkpoint(checkpoint, chunk[1], emitted)
