"""Arbitrary-precision arithmetic services.

Primality testing (deterministic below 2**64, strong-probable-prime style
above), a staged factoring ladder (trial division, Brent's cycle method,
elliptic curves) backed by a persistent factor cache, modular inverses,
Chinese remaindering, and a segmented squarefree enumerator that never
falls back to general factoring.
"""

from __future__ import annotations

import functools
import math
import threading
import time
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence


class NotInvertible(ValueError):
    """Raised when an inverse is requested for a non-unit residue."""


class ModuliNotCoprime(ValueError):
    """Raised when remaindering is attempted over non-coprime moduli."""


class NotSquarefree(ValueError):
    """Raised when an operation requires a squarefree argument."""


_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
    67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137,
    139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199,
)

# These bases make strong-pseudoprime testing exact for all n < 3.3e24,
# which comfortably covers the 64-bit deterministic tier.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    # n odd, positive
    a %= n
    sign = 1
    while a:
        while a & 1 == 0:
            a >>= 1
            if n & 7 in (3, 5):
                sign = -sign
        a, n = n, a
        if a & 3 == 3 and n & 3 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    # Selfridge parameter search: D = 5, -7, 9, -11, ... with (D|n) = -1.
    r = math.isqrt(n)
    if r * r == n:
        return False
    D = 5
    while True:
        j = _jacobi(D % n, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    Q = (1 - D) // 4
    d = n + 1
    s = (d & -d).bit_length() - 1
    d >>= s

    # Lucas sequences for P = 1, by binary double-and-add.
    U, V, Qk = 1, 1, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = U + V, V + D * U
            if U & 1:
                U += n
            if V & 1:
                V += n
            U = (U >> 1) % n
            V = (V >> 1) % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def is_prime(n: int) -> bool:
    """Primality test: exact for n < 2**64, strong BPSW-style beyond.

    Returns False for 0 and 1.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 40401:  # 201**2: fully screened by the table above
        return True
    if n < 1 << 64:
        return all(_strong_probable_prime(n, a) for a in _MR_BASES)
    return _strong_probable_prime(n, 2) and _strong_lucas_probable_prime(n)


@dataclass(frozen=True)
class EffortPolicy:
    """Knobs for the factoring ladder.

    All zero-cost stages run unconditionally; ``time_budget`` of 0 means
    unlimited time.
    """

    trial_bound: int = 10_000
    rho_iterations: int = 400_000
    ecm_curves: int = 50
    ecm_b1: int = 50_000
    time_budget: float = 0.0

    def __post_init__(self) -> None:
        if min(self.trial_bound, self.rho_iterations, self.ecm_curves,
               self.ecm_b1, self.time_budget) < 0:
            raise ValueError("policy fields must be nonnegative")


DEFAULT_POLICY = EffortPolicy()


@dataclass(frozen=True)
class Factorization:
    """A certified, possibly partial, prime-power decomposition.

    ``factors`` lists (prime, exponent) with primes strictly increasing;
    ``cofactor`` is 1 when the decomposition is complete and a proven
    composite otherwise.
    """

    n: int
    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def squarefree(self) -> bool:
        return self.cofactor == 1 and all(e == 1 for _, e in self.factors)

    def product(self) -> int:
        out = self.cofactor
        for p, e in self.factors:
            out *= p ** e
        return out

    def verify(self) -> bool:
        """Full consistency check (used by tests; not on hot paths)."""
        if self.product() != self.n:
            return False
        if any(e < 1 for _, e in self.factors):
            return False
        ps = self.primes
        if list(ps) != sorted(set(ps)):
            return False
        if not all(is_prime(p) for p in ps):
            return False
        return self.cofactor == 1 or not is_prime(self.cofactor)


class FactorCache:
    """Persistent store of known nontrivial splits.

    Plain text, one entry per line, ``composite=factor,factor,...`` in
    decimal. Loaded eagerly; appends are serialized through one lock so
    concurrent factoring jobs can share a cache file.
    """

    def __init__(self, path: Optional[str] = None):
        self.path = path
        self._known: dict[int, list[int]] = {}
        self._lock = threading.Lock()
        if path is not None:
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    for line in fh:
                        line = line.strip()
                        if not line or "=" not in line:
                            continue
                        left, right = line.split("=", 1)
                        comp = int(left)
                        facs = [int(t) for t in right.split(",") if t]
                        self._merge(comp, facs)
            except FileNotFoundError:
                pass

    def _merge(self, composite: int, factors: list[int]) -> bool:
        good = [f for f in factors if 1 < f < composite and composite % f == 0]
        if not good:
            return False
        known = self._known.setdefault(composite, [])
        new = [f for f in good if f not in known]
        known.extend(new)
        return bool(new)

    def lookup(self, composite: int) -> Optional[list[int]]:
        facs = self._known.get(composite)
        return list(facs) if facs else None

    def add(self, composite: int, factors: Sequence[int]) -> None:
        with self._lock:
            if not self._merge(composite, list(factors)):
                return
            if self.path is not None:
                line = "%d=%s\n" % (
                    composite, ",".join(str(f) for f in sorted(set(factors))))
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line)

    def __len__(self) -> int:
        return len(self._known)


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit by a byte sieve."""
    if limit < 2:
        return []
    size = limit + 1
    flags = bytearray([1]) * size
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p:: p] = bytearray(len(range(p * p, size, p)))
    return [i for i in range(size) if flags[i]]


def _trial_division(n: int, bound: int) -> tuple[list[tuple[int, int]], int]:
    found: list[tuple[int, int]] = []
    for p in _SMALL_PRIMES:
        if p > bound and p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found.append((p, e))
    p = _SMALL_PRIMES[-1] + 2
    while p <= bound and p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found.append((p, e))
        p += 2
    return found, n


def _iroot(n: int, k: int) -> int:
    if n < 2 or k == 1:
        return n
    x = 1 << (n.bit_length() // k + 1)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _perfect_power(n: int) -> Optional[tuple[int, int]]:
    for k in (2, 3, 5, 7, 11, 13, 17, 19, 23):
        if 1 << k > n.bit_length() * 2:
            break
        r = _iroot(n, k)
        if r > 1 and r ** k == n:
            return r, k
    return None


def _rho_brent(n: int, max_iters: int, deadline: Optional[float]) -> Optional[int]:
    # Brent-style cycle finding with batched gcds; n odd composite.
    for c in (1, 3, 5, 7, 11):
        y, r, q = 2, 1, 1
        g, ys, x = 1, y, y
        count = 0
        while g == 1 and count < max_iters:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                batch = min(128, r - k)
                for _ in range(batch):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += batch
            count += r
            r <<= 1
            if deadline is not None and time.monotonic() > deadline:
                return None
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def _ecm_stage1(n: int, b1: int, sigma: int, primes: list[int]) -> Optional[int]:
    # Montgomery-curve stage 1 with Suyama parametrization.
    u = (sigma * sigma - 5) % n
    v = 4 * sigma % n
    x = pow(u, 3, n)
    z = pow(v, 3, n)
    num = pow(v - u, 3, n) * (3 * u + v) % n
    den = 16 * x * v % n
    g = math.gcd(den, n)
    if g > 1:
        return g if g < n else None
    a24 = num * pow(den, -1, n) % n

    def x_double(x1, z1):
        s = (x1 + z1) * (x1 + z1) % n
        d = (x1 - z1) * (x1 - z1) % n
        t = s - d
        return s * d % n, t * (d + a24 * t) % n

    def x_add(x1, z1, x2, z2, xd, zd):
        a = (x1 - z1) * (x2 + z2) % n
        b = (x1 + z1) * (x2 - z2) % n
        return zd * (a + b) * (a + b) % n, xd * (a - b) * (a - b) % n

    def ladder(k, x0, z0):
        x1, z1 = x0, z0
        x2, z2 = x_double(x0, z0)
        for bit in bin(k)[3:]:
            if bit == "1":
                x1, z1 = x_add(x2, z2, x1, z1, x0, z0)
                x2, z2 = x_double(x2, z2)
            else:
                x2, z2 = x_add(x1, z1, x2, z2, x0, z0)
                x1, z1 = x_double(x1, z1)
        return x1, z1

    for p in primes:
        pe = p
        while pe * p <= b1:
            pe *= p
        x, z = ladder(pe, x, z)
        if z == 0:
            return None
    g = math.gcd(z, n)
    if 1 < g < n:
        return g
    return None


@functools.lru_cache(maxsize=4)
def _ecm_primes(b1: int) -> list[int]:
    return sieve_primes(b1)


def _split_composite(m: int, policy: EffortPolicy, cache: Optional[FactorCache],
                     deadline: Optional[float]) -> Optional[list[int]]:
    if cache is not None:
        entry = cache.lookup(m)
        if entry:
            parts: list[int] = []
            rem = m
            for f in entry:
                if rem % f == 0 and 1 < f < rem:
                    parts.append(f)
                    rem //= f
            if parts:
                if rem > 1:
                    parts.append(rem)
                return parts
    power = _perfect_power(m)
    if power is not None:
        base, exp = power
        return [base] * exp
    if policy.rho_iterations:
        d = _rho_brent(m, policy.rho_iterations, deadline)
        if d is not None:
            return [d, m // d]
    if policy.ecm_curves and policy.ecm_b1 >= 2:
        primes = _ecm_primes(policy.ecm_b1)
        for sigma in range(6, 6 + policy.ecm_curves):
            if deadline is not None and time.monotonic() > deadline:
                break
            d = _ecm_stage1(m, policy.ecm_b1, sigma, primes)
            if d is not None:
                return [d, m // d]
    return None


def factor(n: int, policy: EffortPolicy = DEFAULT_POLICY,
           cache: Optional[FactorCache] = None) -> Factorization:
    """Factor n >= 1 through the staged ladder.

    Returns a complete decomposition when the policy's effort suffices,
    otherwise a partial one whose cofactor is a proven composite. Every
    split discovered beyond the 64-bit range is recorded in the cache.
    """
    if n < 1:
        raise ValueError("factor() requires n >= 1")
    deadline = (time.monotonic() + policy.time_budget
                if policy.time_budget else None)
    counts: dict[int, int] = {}
    small, rest = _trial_division(n, policy.trial_bound)
    for p, e in small:
        counts[p] = counts.get(p, 0) + e

    stack = [rest] if rest > 1 else []
    leftover: list[int] = []
    while stack:
        m = stack.pop()
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        parts = _split_composite(m, policy, cache, deadline)
        if parts is None:
            leftover.append(m)
            continue
        if cache is not None and m >= 1 << 64:
            cache.add(m, parts)
        stack.extend(parts)

    cofactor = 1
    for m in leftover:
        cofactor *= m
    return Factorization(n, tuple(sorted(counts.items())), cofactor)


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m, in [1, m). Raises NotInvertible on gcd > 1."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    try:
        return pow(a % m, -1, m)
    except ValueError:
        raise NotInvertible(f"{a} has no inverse modulo {m}") from None


def crt(congruences: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """Solve simultaneous congruences with pairwise coprime moduli.

    Returns (r, M) with M the product of the moduli and r in [0, M).
    """
    a, M = 0, 1
    for r, m in congruences:
        if m < 2:
            raise ValueError("moduli must be >= 2")
        g = math.gcd(M, m)
        if g != 1:
            raise ModuliNotCoprime(f"moduli share a factor of {g}")
        t = (r - a) * pow(M, -1, m) % m
        a += M * t
        M *= m
    return a, M


def squarefree_stream(lo: int, hi: int, min_omega: int = 0,
                      coprime_to: int = 1,
                      ) -> Iterator[tuple[int, Factorization]]:
    """Yield each squarefree m in [lo, hi] with its complete factorization.

    Filters to at least ``min_omega`` distinct prime factors and
    gcd(m, coprime_to) == 1. Entirely sieve-driven: the residual after
    removing primes up to sqrt(hi) is 1 or a single large prime.
    """
    if lo < 1 or lo > hi:
        raise ValueError("need 1 <= lo <= hi")
    if coprime_to < 1:
        raise ValueError("coprime_to must be >= 1")
    base = sieve_primes(math.isqrt(hi))
    seg = 1 << 16
    gcd = math.gcd
    for start in range(lo, hi + 1, seg):
        end = min(start + seg - 1, hi)
        size = end - start + 1
        residual = list(range(start, end + 1))
        facs: list[list[int]] = [[] for _ in range(size)]
        sqf = bytearray([1]) * size
        for p in base:
            first = -start % p
            for i in range(first, size, p):
                facs[i].append(p)
                residual[i] //= p
            pp = p * p
            first = -start % pp
            for i in range(first, size, pp):
                sqf[i] = 0
        for i in range(size):
            if not sqf[i]:
                continue
            m = start + i
            fs = facs[i]
            r = residual[i]
            if r > 1:
                fs.append(r)
            if len(fs) < min_omega:
                continue
            if coprime_to > 1 and gcd(m, coprime_to) != 1:
                continue
            yield m, Factorization(m, tuple((p, 1) for p in fs))
