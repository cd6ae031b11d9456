"""Construction and exploration of the Euclid-Mullin graph.

The graph rooted at n has an edge from m to m*p for every distinct prime
p dividing m+1, so a directed path is a tuple of edge primes. This module
expands nodes through the factoring ladder, runs level censuses with
checkpoints, explores deep levels following only small-prime edges,
watches for residue classes that base loops, computes the least/largest
prime factor sequences, scans for unique-child chains, and simulates the
heuristic growth model for node sizes.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

from .arith import (DEFAULT_POLICY, EffortPolicy, FactorCache, factor,
                    is_prime, sieve_primes)
from .tuples import ResidueClass


@dataclass(frozen=True)
class Node:
    """A graph node identified by its root and the edge primes to it."""

    root: int
    edge_primes: tuple[int, ...] = ()
    complete: bool = True

    @property
    def level(self) -> int:
        return len(self.edge_primes)

    @property
    def value(self) -> int:
        v = self.root
        for p in self.edge_primes:
            v *= p
        return v

    def child(self, p: int, complete: bool = True) -> "Node":
        return Node(self.root, self.edge_primes + (p,), complete)


@dataclass(frozen=True)
class LevelSummary:
    """Distinct node values at one level, plus blocked expansions into it."""

    level: int
    node_count: int
    composite_count: int


@dataclass(frozen=True)
class WatchList:
    classes: tuple[ResidueClass, ...]

    @staticmethod
    def load(path: str) -> "WatchList":
        classes = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                classes.append(ResidueClass(int(obj["a"]), int(obj["m"])))
        return WatchList(tuple(classes))

    def dump(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rc in self.classes:
                fh.write(json.dumps({"a": str(rc.a), "m": str(rc.m)},
                                    sort_keys=True) + "\n")


def expand_node(v: Node, policy: EffortPolicy = DEFAULT_POLICY,
                cache: Optional[FactorCache] = None) -> tuple[Node, list[Node]]:
    """Children of v, one per distinct known prime of value+1.

    Returns the node itself (marked incomplete when the factorization
    left a composite cofactor, so a grown cache can retry it) together
    with the children discovered.
    """
    fz = factor(v.value + 1, policy, cache)
    marked = Node(v.root, v.edge_primes, fz.complete)
    children = [marked.child(p, True) for p in fz.primes]
    return marked, children


def _policy_fingerprint(policy: EffortPolicy) -> str:
    return (f"{policy.trial_bound}:{policy.rho_iterations}:"
            f"{policy.ecm_curves}:{policy.ecm_b1}")


def save_frontier(path: str, level: int, policy: EffortPolicy,
                  nodes: Iterable[Node],
                  summaries: Sequence[LevelSummary]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "level": level,
            "policy": _policy_fingerprint(policy),
            "summaries": [[s.level, s.node_count, s.composite_count]
                          for s in summaries],
        }, sort_keys=True) + "\n")
        for nd in nodes:
            fh.write(json.dumps({
                "root": str(nd.root),
                "edges": [str(p) for p in nd.edge_primes],
                "complete": nd.complete,
            }, sort_keys=True) + "\n")


def load_frontier(path: str) -> tuple[int, str, list[LevelSummary],
                                      list[Node]]:
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        nodes = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            nodes.append(Node(int(obj["root"]),
                              tuple(int(p) for p in obj["edges"]),
                              bool(obj["complete"])))
    summaries = [LevelSummary(*row) for row in header["summaries"]]
    return int(header["level"]), header["policy"], summaries, nodes


def bfs_levels(root: int, max_level: int,
               policy: EffortPolicy = DEFAULT_POLICY,
               cache: Optional[FactorCache] = None,
               checkpoint: Optional[str] = None) -> list[LevelSummary]:
    """Level census by breadth-first expansion with value deduplication.

    ``composite_count`` for level L counts the unfactored cofactors hit
    while expanding level L-1, i.e. the children still hidden at L. The
    frontier and the summaries so far are checkpointed after each level
    for resumption under the same policy.
    """
    if root < 1:
        raise ValueError("root must be >= 1")
    frontier = [Node(root)]
    level = 0
    summaries = [LevelSummary(0, 1, 0)]
    if checkpoint is not None:
        try:
            lv, fp, sums, nodes = load_frontier(checkpoint)
            if fp == _policy_fingerprint(policy) and lv <= max_level:
                level, summaries, frontier = lv, sums, nodes
        except FileNotFoundError:
            pass

    while level < max_level:
        next_by_value: dict[int, Node] = {}
        blocked = 0
        for nd in frontier:
            marked, children = expand_node(nd, policy, cache)
            if not marked.complete:
                blocked += 1
            for ch in children:
                next_by_value.setdefault(ch.value, ch)
        frontier = [next_by_value[v] for v in sorted(next_by_value)]
        level += 1
        summaries.append(LevelSummary(level, len(frontier), blocked))
        if checkpoint is not None:
            save_frontier(checkpoint, level, policy, frontier, summaries)
    return summaries


_GCD_BLOCK = 512


@lru_cache(maxsize=4)
def _prime_blocks(bound: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
    ps = sieve_primes(bound)
    blocks = []
    for i in range(0, len(ps), _GCD_BLOCK):
        chunk = tuple(ps[i:i + _GCD_BLOCK])
        blocks.append((math.prod(chunk), chunk))
    return tuple(blocks)


def small_prime_factors(x: int, bound: int) -> list[int]:
    """Distinct primes <= bound dividing x, by blocked gcd extraction."""
    out = []
    for prod_, chunk in _prime_blocks(bound):
        g = math.gcd(x, prod_)
        if g == 1:
            continue
        for p in chunk:
            if g % p == 0:
                out.append(p)
                g //= p
                if g == 1:
                    break
    return out


def bounded_explore(roots: Sequence[Union[Node, int]], bound: int,
                    max_level: int) -> Iterator[Node]:
    """Breadth-first walk following only edges with prime <= bound.

    Child primes come from trial division of value+1 below the bound:
    no general factoring is ever attempted. Every reach is yielded, but
    each value is expanded only once, so a value surfacing twice in the
    stream marks two distinct edge paths to it.
    """
    if bound < 2:
        raise ValueError("bound must be >= 2")
    frontier = [r if isinstance(r, Node) else Node(r) for r in roots]
    seen = {nd.value for nd in frontier}
    for nd in frontier:
        yield nd
    level = 0
    while frontier and level < max_level:
        nxt = []
        for nd in frontier:
            for p in small_prime_factors(nd.value + 1, bound):
                ch = nd.child(p)
                yield ch
                v = ch.value
                if v not in seen:
                    seen.add(v)
                    nxt.append(ch)
        frontier = nxt
        level += 1


def watch_hits(nodes: Iterable[Node], w: WatchList
               ) -> Iterator[tuple[Node, ResidueClass]]:
    """Nodes landing in a watched residue class: each is a loop base."""
    for nd in nodes:
        v = nd.value
        for rc in w.classes:
            if v % rc.m == rc.a:
                yield nd, rc


def verify_path(n: int, primes: Sequence[int]) -> bool:
    """Check the full divisibility chain for edge list ``primes`` from n."""
    ps = tuple(primes)
    if len(set(ps)) != len(ps):
        return False
    if not all(is_prime(p) for p in ps):
        return False
    acc = n
    for p in ps:
        if (acc + 1) % p:
            return False
        acc *= p
    return True


# Edge primes of the two known level-21 values reachable from 1 by two
# distinct paths; swapping 73 and 593 gives the second path of each.
DOUBLE_PATH_EDGE_LISTS = (
    tuple(int(s) for s in (
        "2", "3", "7", "43", "139", "50207", "1607", "38891",
        "71609249149971437", "104851",
        "5914302068415095755097398828253214149923",
        "103", "1750880132687750604376675981842334069",
        "103451", "193", "22133", "5587528960270206397663051",
        "73", "5", "13", "593",
    )),
    tuple(int(s) for s in (
        "2", "3", "7", "43", "139", "50207", "23", "217733",
        "4024572619121", "539402497343", "72208156847017648587223", "79",
        "7269452239696911635939429787229069136737446558564286318153183",
        "8689", "107",
        "2895777621755988962510175673615781760909999040975810951",
        "531543631", "73", "5", "13", "593",
    )),
)

_LOOP_BLOCK = (73, 5, 13, 593)
_LOOP_BLOCK_RESIDUES = (1125513, 1861426)


@dataclass(frozen=True)
class CheckReport:
    checks: tuple[tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    def lines(self) -> list[str]:
        return [f"{'PASS' if p else 'FAIL'}  {name}" for name, p in self.checks]


def _swap(seq: Sequence[int], a: int, b: int) -> tuple[int, ...]:
    return tuple(b if v == a else a if v == b else v for v in seq)


def verify_double_paths() -> CheckReport:
    """Certify the two known nodes connected to 1 by two distinct paths.

    For each edge list: the stated order is a valid path from 1, the
    order with 73 and 593 swapped is a second valid path, the two orders
    are distinct tuples of equal product, both end in the quadruple block
    {73, 5, 13, 593}, and the block's loop base lands in a known residue
    class of modulus 2813785. A control swap (5 and 13) must fail.
    """
    checks: list[tuple[str, bool]] = []
    loop_modulus = math.prod(_LOOP_BLOCK)
    for i, edges in enumerate(DOUBLE_PATH_EDGE_LISTS, start=1):
        swapped = _swap(edges, 73, 593)
        checks.append((f"number {i}: stated order is a valid path from 1",
                       verify_path(1, edges)))
        checks.append((f"number {i}: 73<->593 swap is a valid path from 1",
                       verify_path(1, swapped)))
        checks.append((f"number {i}: the two orders are distinct",
                       edges != swapped))
        checks.append((f"number {i}: the two orders reach one value",
                       math.prod(edges) == math.prod(swapped)))
        checks.append((f"number {i}: level is 21", len(edges) == 21))
        tail = edges[-4:]
        checks.append((f"number {i}: path ends in the {{73,5,13,593}} block",
                       sorted(tail) == sorted(_LOOP_BLOCK)))
        base = math.prod(edges[:-4])
        checks.append(
            (f"number {i}: loop base lies in a known class mod {loop_modulus}",
             base % loop_modulus in _LOOP_BLOCK_RESIDUES))
        checks.append((f"number {i}: control 5<->13 swap is not a valid path",
                       not verify_path(1, _swap(edges, 5, 13))))
    return CheckReport(tuple(checks))


def euclid_mullin(n: int, steps: int, policy: EffortPolicy = DEFAULT_POLICY,
                  rule: str = "least",
                  cache: Optional[FactorCache] = None) -> list[int]:
    """Iterate the least/largest prime factor sequence from start value n.

    Stops early with a partial list when the factoring effort cannot
    certify the requested prime: the least factor is still certain when
    the smallest known prime is within the trial bound, while the largest
    requires a complete factorization.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if rule not in ("least", "largest"):
        raise ValueError("rule must be 'least' or 'largest'")
    out: list[int] = []
    acc = n
    for _ in range(steps):
        fz = factor(acc + 1, policy, cache)
        if not fz.primes:
            break
        if rule == "least":
            p = fz.primes[0]
            if not fz.complete and p > policy.trial_bound:
                break
        else:
            if not fz.complete:
                break
            p = fz.primes[-1]
        out.append(p)
        acc *= p
    return out


def unique_chain_scan(nodes: Iterable[Node], ell: int) -> Iterator[Node]:
    """Nodes whose next ell descendants each have exactly one child.

    Equivalent to value+1 being prime at each of the ell successive steps.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    for nd in nodes:
        v = nd.value
        ok = True
        for _ in range(ell):
            nxt = v + 1
            if not is_prime(nxt):
                ok = False
                break
            v *= nxt
        if ok:
            yield nd


@dataclass(frozen=True)
class GrowthStats:
    """Per-trial terminal ratios of the growth model, with aggregates."""

    k_max: int
    trials: int
    seed: int
    ratios: tuple[float, ...]
    mean: float
    stddev: float


def simulate_growth_model(k_max: int, trials: int, seed: int,
                          n0: float = 1.0) -> GrowthStats:
    """Randomized growth model for node sizes along a path.

    Each step multiplies the node value by exp(log(n+1)**theta) with
    theta uniform on [0, 1). The iteration tracks log(n) directly while
    values are small, then switches to y = log(log(n)) where the update
    is y += log1p(exp((theta-1)*y)), which is numerically stable because
    the exponent is nonpositive. Reports y/sqrt(2k) per trial.
    """
    if k_max < 1 or trials < 1:
        raise ValueError("k_max and trials must be >= 1")
    if n0 < 1:
        raise ValueError("n0 must be >= 1")
    log1p, exp, log = math.log1p, math.exp, math.log
    ratios = []
    scale = math.sqrt(2 * k_max)
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        l = log(n0)  # log of the node value
        k = 0
        # small regime: keep the +1 inside log(n+1) exact
        while k < k_max and l < 120.0:
            theta = rng.random()
            l += (l + log1p(exp(-l))) ** theta
            k += 1
        if k == k_max:
            ratios.append(log(l) / scale)
            continue
        y = log(l)
        for _ in range(k_max - k):
            theta = rng.random()
            y += log1p(exp((theta - 1.0) * y))
        ratios.append(y / scale)
    mean = sum(ratios) / trials
    var = sum((r - mean) ** 2 for r in ratios) / trials
    return GrowthStats(k_max, trials, seed, tuple(ratios),
                       mean, math.sqrt(var))
