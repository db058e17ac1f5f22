"""Subshift-of-finite-type base dynamics with exact eventually-periodic points.

Every point carries explicit periodic tails on both sides.  This class of
sequences is closed under shifting, splicing, orbit closing and homoclinic
enumeration, contains all periodic points, and admits decidable equality and
an exactly computable metric, which is what the rest of the library leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    CylinderMismatch,
    InadmissibleLoop,
    NotStablePair,
    NotUnstablePair,
    ResourceLimit,
)

Word = tuple[int, ...]


def _primitive(word: Word) -> Word:
    """Shortest word whose repetition tiles ``word``."""
    n = len(word)
    for d in range(1, n):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d]
    return word


def _rot_left(word: Word) -> Word:
    return word[1:] + word[:1]


def _rot_right(word: Word) -> Word:
    return word[-1:] + word[:-1]


@dataclass(frozen=True)
class SFTSpace:
    """Two-sided shift space over symbols ``0..k-1`` restricted by a 0/1 matrix.

    ``rho`` is the base of the metric ``d(x, y) = rho**(-N)`` and is kept as a
    parameter because domination margins downstream depend on it.
    """

    k: int
    P: tuple[tuple[int, ...], ...]
    rho: int | float | Fraction = 2

    def __post_init__(self):
        object.__setattr__(self, "P", tuple(tuple(int(e) for e in row) for row in self.P))
        if self.k < 2:
            raise ValueError("need at least two symbols")
        if len(self.P) != self.k or any(len(row) != self.k for row in self.P):
            raise ValueError("transition matrix must be k x k")
        if any(e not in (0, 1) for row in self.P for e in row):
            raise ValueError("transition matrix entries must be 0 or 1")
        if any(not any(row) for row in self.P):
            raise ValueError("transition matrix has a null row")
        if not self.rho > 1:
            raise ValueError("rho must exceed 1")
        if not self._has_cycle():
            raise ValueError("transition graph has no cycle")

    def _has_cycle(self) -> bool:
        # out-degree >= 1 everywhere forces a cycle; verified by walking.
        seen, s = [], 0
        while s not in seen:
            seen.append(s)
            s = self.successors(s)[0]
        return True

    @classmethod
    def full_shift(cls, k: int, rho=2) -> "SFTSpace":
        return cls(k, tuple((1,) * k for _ in range(k)), rho)

    @classmethod
    def golden_mean(cls, rho=2) -> "SFTSpace":
        """Two symbols, the word 11 forbidden."""
        return cls(2, ((1, 1), (1, 0)), rho)

    def admissible(self, i: int, j: int) -> bool:
        return self.P[i][j] == 1

    def successors(self, i: int) -> Word:
        return tuple(j for j in range(self.k) if self.P[i][j])

    def predecessors(self, j: int) -> Word:
        return tuple(i for i in range(self.k) if self.P[i][j])

    def admissible_word(self, word) -> bool:
        return all(self.P[a][b] == 1 for a, b in zip(word, word[1:]))

    def admissible_cycle(self, word) -> bool:
        return bool(word) and self.admissible_word(word) and self.P[word[-1]][word[0]] == 1

    def words(self, length: int):
        """All admissible words of the given length, lexicographic order."""
        if length == 0:
            yield ()
            return
        stack = [(s,) for s in range(self.k - 1, -1, -1)]
        while stack:
            w = stack.pop()
            if len(w) == length:
                yield w
            else:
                for s in range(self.k - 1, -1, -1):
                    if self.P[w[-1]][s]:
                        stack.append(w + (s,))

    def to_json(self) -> dict:
        rho = self.rho
        return {
            "k": self.k,
            "P": [list(row) for row in self.P],
            "rho": float(rho) if not isinstance(rho, int) else rho,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SFTSpace":
        return cls(int(doc["k"]), tuple(tuple(row) for row in doc["P"]), doc.get("rho", 2))


def _canonical(left: Word, core: Word, right: Word, core_start: int):
    """Unique representative: primitive tails, maximally absorbed core,
    leftmost junction, and periodic points anchored at coordinate 0."""
    left = _primitive(left)
    right = _primitive(right)
    while core and core[-1] == right[-1]:
        right = _rot_right(right)
        core = core[:-1]
    while core and core[0] == left[0]:
        left = _rot_left(left)
        core = core[1:]
        core_start += 1
    if core:
        return left, core, right, core_start
    p, q = len(left), len(right)
    m = math.lcm(p, q)
    if all(left[(-1 - i) % p] == right[(-1 - i) % q] for i in range(m)):
        # fully periodic: re-anchor the word at coordinate 0
        w = tuple(right[(n - core_start) % q] for n in range(q))
        return w, (), w, 0
    steps = 0
    while right[-1] == left[-1]:
        right = _rot_right(right)
        left = _rot_right(left)
        core_start -= 1
        steps += 1
        if steps > m:  # pragma: no cover - excluded by the periodicity test
            raise AssertionError("junction normalisation failed to terminate")
    return left, (), right, core_start


@dataclass(frozen=True)
class SymbolicPoint:
    """Eventually-periodic bi-infinite admissible sequence.

    ``left`` tiles all coordinates below ``core_start`` (its last letter sits
    immediately left of the core), ``core`` occupies ``core_start ..
    core_start+len(core)-1`` and ``right`` tiles everything after.  Instances
    are always in canonical form, so dataclass equality is point equality.
    """

    space: SFTSpace
    left: Word
    core: Word
    right: Word
    core_start: int

    @classmethod
    def make(cls, space: SFTSpace, left, core, right, core_start: int = 0) -> "SymbolicPoint":
        left, core, right = tuple(left), tuple(core), tuple(right)
        if not left or not right:
            raise ValueError("periodic tails must be non-empty")
        for w in (left, core, right):
            if any(not (0 <= s < space.k) for s in w):
                raise ValueError("symbol out of range")
        if not (space.admissible_cycle(left) and space.admissible_cycle(right)):
            raise ValueError("periodic tail is not an admissible cycle")
        seam = (left[-1],) + core + (right[0],)
        if not space.admissible_word(seam):
            raise ValueError("core or junction is not admissible")
        return cls(space, *_canonical(left, core, right, core_start))

    @classmethod
    def periodic(cls, space: SFTSpace, word) -> "SymbolicPoint":
        """The point ``x_n = word[n mod len(word)]``."""
        word = tuple(word)
        if not space.admissible_cycle(word):
            raise ValueError("word is not an admissible cycle")
        return cls.make(space, word, (), word, 0)

    @classmethod
    def fixed(cls, space: SFTSpace, symbol: int) -> "SymbolicPoint":
        return cls.periodic(space, (symbol,))

    def __getitem__(self, n: int) -> int:
        a = self.core_start
        if n < a:
            return self.left[(n - a) % len(self.left)]
        if n < a + len(self.core):
            return self.core[n - a]
        return self.right[(n - a - len(self.core)) % len(self.right)]

    def window(self, lo: int, hi: int) -> Word:
        """Symbols at coordinates ``lo .. hi-1``."""
        return tuple(self[n] for n in range(lo, hi))

    def shift(self, n: int = 1) -> "SymbolicPoint":
        """sigma**n: coordinate i of the result is coordinate i+n of self."""
        if self.is_periodic:
            p = len(self.right)
            w = tuple(self.right[(i + n) % p] for i in range(p))
            return SymbolicPoint(self.space, w, (), w, 0)
        return SymbolicPoint(self.space, self.left, self.core, self.right, self.core_start - n)

    @property
    def is_periodic(self) -> bool:
        return not self.core and self.left == self.right and self.core_start == 0

    @property
    def period(self) -> int | None:
        """Minimal sigma-period, or None for non-periodic points."""
        return len(self.right) if self.is_periodic else None

    def sort_key(self):
        return (self.core_start, self.core, self.left, self.right)

    def __repr__(self):
        def w(word):
            return "".join(str(s) for s in word) if self.space.k <= 10 else ",".join(map(str, word))

        return f"<({w(self.left)})*|{w(self.core)}@{self.core_start}|({w(self.right)})*>"

    def to_json(self) -> dict:
        return {
            "left": list(self.left),
            "core": list(self.core),
            "right": list(self.right),
            "core_start": self.core_start,
        }

    @classmethod
    def from_json(cls, space: SFTSpace, doc: dict) -> "SymbolicPoint":
        return cls.make(space, doc["left"], doc["core"], doc["right"], doc.get("core_start", 0))


def distance_exponent(x: SymbolicPoint, y: SymbolicPoint) -> int | None:
    """Largest N with x_n = y_n for all |n| < N, or None when x == y."""
    if x.space != y.space:
        raise ValueError("points live in different spaces")
    if x == y:
        return None
    n = 0
    while True:
        if x[n] != y[n] or x[-n] != y[-n]:
            return n
        n += 1


def distance(x: SymbolicPoint, y: SymbolicPoint):
    """rho**(-N) with N the symmetric agreement radius; 0 iff x == y."""
    n = distance_exponent(x, y)
    if n is None:
        return 0
    return x.space.rho ** (-n)


def bracket(y: SymbolicPoint, z: SymbolicPoint) -> SymbolicPoint:
    """Local product point w with w_n = y_n for n >= 0 and w_n = z_n for n <= 0."""
    if y.space != z.space:
        raise ValueError("points live in different spaces")
    if y[0] != z[0]:
        raise CylinderMismatch(f"coordinate-0 symbols differ: {y[0]} vs {z[0]}")
    lo = min(z.core_start, 0)
    hi = max(y.core_start + len(y.core), 0)
    p, q = len(z.left), len(y.right)
    r0y = y.core_start + len(y.core)
    left = tuple(z.left[(i + lo - z.core_start) % p] for i in range(p))
    right = tuple(y.right[(i + hi - r0y) % q] for i in range(q))
    core = tuple((z[n] if n <= 0 else y[n]) for n in range(lo, hi))
    return SymbolicPoint.make(y.space, left, core, right, lo)


def stable_agreement_onset(x: SymbolicPoint, y: SymbolicPoint) -> int:
    """Smallest N >= 0 with x_m = y_m for all m >= N; NotStablePair otherwise."""
    hi = max(x.core_start + len(x.core), y.core_start + len(y.core), 0)
    span = math.lcm(len(x.right), len(y.right))
    if any(x[m] != y[m] for m in range(hi, hi + span)):
        raise NotStablePair("forward tails differ")
    onset = 0
    for m in range(hi):
        if x[m] != y[m]:
            onset = m + 1
    return onset


def unstable_agreement_onset(x: SymbolicPoint, y: SymbolicPoint) -> int:
    """Smallest N >= 0 with x_m = y_m for all m <= -N; NotUnstablePair otherwise."""
    lo = min(x.core_start, y.core_start, 0)
    span = math.lcm(len(x.left), len(y.left))
    if any(x[m] != y[m] for m in range(lo - span, lo)):
        raise NotUnstablePair("backward tails differ")
    onset = 0
    for m in range(lo, 1):
        if x[m] != y[m]:
            onset = max(onset, -m + 1)
    return onset


def is_stable_pair(x: SymbolicPoint, y: SymbolicPoint) -> bool:
    try:
        stable_agreement_onset(x, y)
        return True
    except NotStablePair:
        return False


def is_unstable_pair(x: SymbolicPoint, y: SymbolicPoint) -> bool:
    try:
        unstable_agreement_onset(x, y)
        return True
    except NotUnstablePair:
        return False


def _admissible_cycles(space: SFTSpace, length: int):
    for w in space.words(length):
        if space.P[w[-1]][w[0]]:
            yield w


def periodic_points(space: SFTSpace, max_period: int, cap: int = 200_000) -> list[SymbolicPoint]:
    """All points fixed by some sigma**n, n <= max_period, each listed once."""
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    seen = set()
    count = 0
    for n in range(1, max_period + 1):
        for w in _admissible_cycles(space, n):
            count += 1
            if count > cap:
                raise ResourceLimit(f"periodic enumeration exceeded cap {cap}")
            seen.add(SymbolicPoint.periodic(space, w))
    return sorted(seen, key=SymbolicPoint.sort_key)


def homoclinic_points(
    x0: SymbolicPoint,
    core_len: int,
    variant: str = "homoclinic",
    cap: int = 200_000,
) -> list[SymbolicPoint]:
    """Points asymptotic to the orbit of the periodic point ``x0``.

    Tails outside the centred window ``[-core_len, core_len)`` are pinned to
    reference phases: both to ``x0`` for ``variant="homoclinic"``; for
    ``variant="w_set"`` the backward tail follows ``sigma**(period-1)(x0)``,
    which is the set the period-n0 construction samples.  Window fillings may
    deviate from the reference on at most ``core_len`` coordinates.
    """
    if x0.period is None:
        raise ValueError("x0 must be periodic")
    if core_len < 0:
        raise ValueError("core_len must be >= 0")
    if variant not in ("homoclinic", "w_set"):
        raise ValueError(f"unknown variant {variant!r}")
    space = x0.space
    left_ref = x0 if variant == "homoclinic" else x0.shift(x0.period - 1)
    right_ref = x0
    wl, wr = left_ref.right, right_ref.right
    pl, pr = len(wl), len(wr)
    a = -core_len
    left = tuple(wl[(i + a) % pl] for i in range(pl))
    right = tuple(wr[(i + core_len) % pr] for i in range(pr))

    out = set()
    if core_len == 0:
        try:
            out.add(SymbolicPoint.make(space, left, (), right, 0))
        except ValueError:
            pass
        return sorted(out, key=SymbolicPoint.sort_key)

    prev0 = left_ref[a - 1]
    nxt = right_ref[core_len]
    ref = [left_ref[n] if n < 0 else right_ref[n] for n in range(a, core_len)]
    count = 0
    stack = [((), prev0, 0)]
    while stack:
        filling, prev, dev = stack.pop()
        i = len(filling)
        if i == 2 * core_len:
            if space.P[prev][nxt]:
                count += 1
                if count > cap:
                    raise ResourceLimit(f"homoclinic enumeration exceeded cap {cap}")
                out.add(SymbolicPoint.make(space, left, filling, right, a))
            continue
        for s in range(space.k - 1, -1, -1):
            if not space.P[prev][s]:
                continue
            d = dev + (s != ref[i])
            if d <= core_len:
                stack.append((filling + (s,), s, d))
    return sorted(out, key=SymbolicPoint.sort_key)


def closing_point_range(y: SymbolicPoint, lo: int, hi: int) -> SymbolicPoint:
    """Periodic point repeating the word ``y_lo .. y_{hi-1}`` in place."""
    if hi <= lo:
        raise ValueError("empty closing window")
    word = y.window(lo, hi)
    if not y.space.P[word[-1]][word[0]]:
        raise InadmissibleLoop(f"wrap pair ({word[-1]}, {word[0]}) is forbidden")
    span = hi - lo
    anchored = tuple(word[(i - lo) % span] for i in range(span))
    return SymbolicPoint.periodic(y.space, anchored)


def closing_point(y: SymbolicPoint, n: int) -> SymbolicPoint:
    """2n-periodic point repeating ``y_{-n} .. y_{n-1}``; shadows the loop of y."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return closing_point_range(y, -n, n)


def verify_closing_bound(y: SymbolicPoint, n: int):
    """Exact shadowing exponents for the closing point of ``y`` at radius n.

    Returns (rows, ok) where each row is (j, observed, required): the shifted
    pair agrees to radius ``observed`` (None = equal) and the shadowing bound
    demands at least ``min(j, 2n-j) + M`` with ``rho**-M`` the loop gap.
    """
    z = closing_point(y, n)
    m = distance_exponent(y.shift(n), y.shift(-n))
    rows = []
    ok = True
    for j in range(0, 2 * n + 1):
        obs = distance_exponent(y.shift(j - n), z.shift(j - n))
        if m is None:
            required = None
            good = obs is None
        else:
            required = min(j, 2 * n - j) + m
            good = obs is None or obs >= required
        rows.append((j, obs, required))
        ok = ok and good
    return rows, ok


@dataclass(frozen=True)
class PseudoOrbit:
    """Finite orbit-with-jumps: consecutive gaps d(sigma(y_i), y_{i+1}) <= eps."""

    points: tuple[SymbolicPoint, ...]
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise ValueError("need at least two points")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        for a, b in zip(self.points, self.points[1:]):
            if distance(a.shift(1), b) > self.eps:
                raise ValueError("gap exceeds eps")

    @classmethod
    def closing_loop(cls, y: SymbolicPoint, n: int) -> "PseudoOrbit":
        """The loop sigma^-n(y), ..., sigma^n(y) wrapped back to its start."""
        pts = [y.shift(j) for j in range(-n, n)] + [y.shift(-n)]
        gap = distance(y.shift(n), y.shift(-n))
        eps = gap if gap > 0 else float(y.space.rho) ** (-(2 * n))
        return cls(tuple(pts), eps)


@dataclass(frozen=True)
class MarkovMeasure:
    """Markov measure compatible with the transition structure.

    These are the concrete fully-supported measures with local product
    structure used by the rigidity experiments.
    """

    space: SFTSpace
    Q: tuple[tuple[float, ...], ...]
    pi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "Q", tuple(tuple(float(q) for q in row) for row in self.Q))
        object.__setattr__(self, "pi", tuple(float(p) for p in self.pi))
        k = self.space.k
        if len(self.Q) != k or any(len(r) != k for r in self.Q):
            raise ValueError("Q must be k x k")
        for i in range(k):
            if abs(sum(self.Q[i]) - 1.0) > 1e-9:
                raise ValueError(f"row {i} of Q does not sum to 1")
            for j in range(k):
                if (self.Q[i][j] > 0) != (self.space.P[i][j] == 1):
                    raise ValueError("support of Q must match P")
        if len(self.pi) != k or abs(sum(self.pi) - 1.0) > 1e-9 or min(self.pi) <= 0:
            raise ValueError("pi must be a positive probability vector")
        piQ = np.array(self.pi) @ np.array(self.Q)
        if np.max(np.abs(piQ - np.array(self.pi))) > 1e-9:
            raise ValueError("pi is not stationary for Q")
        if not self.is_irreducible():
            raise ValueError("chain is not irreducible")

    def is_irreducible(self) -> bool:
        k = self.space.k

        def reach(adj):
            seen = {0}
            frontier = [0]
            while frontier:
                i = frontier.pop()
                for j in range(k):
                    if adj[i][j] and j not in seen:
                        seen.add(j)
                        frontier.append(j)
            return len(seen) == k

        fwd = self.space.P
        bwd = tuple(tuple(self.space.P[j][i] for j in range(k)) for i in range(k))
        return reach(fwd) and reach(bwd)

    @classmethod
    def from_matrix(cls, space: SFTSpace, Q) -> "MarkovMeasure":
        Q = np.array(Q, dtype=float)
        k = space.k
        a = Q.T - np.eye(k)
        a[-1, :] = 1.0
        b = np.zeros(k)
        b[-1] = 1.0
        pi = np.linalg.solve(a, b)
        return cls(space, tuple(map(tuple, Q)), tuple(pi))

    @classmethod
    def uniform(cls, space: SFTSpace) -> "MarkovMeasure":
        """Rows of P normalised; Bernoulli(1/k,...) on a full shift."""
        Q = [[e / sum(row) for e in row] for row in space.P]
        return cls.from_matrix(space, Q)

    def backward_kernel(self) -> tuple[tuple[float, ...], ...]:
        k = self.space.k
        return tuple(
            tuple(self.pi[j] * self.Q[j][i] / self.pi[i] for j in range(k)) for i in range(k)
        )

    def to_json(self) -> dict:
        doc = self.space.to_json()
        doc["Q"] = [list(r) for r in self.Q]
        doc["pi"] = list(self.pi)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "MarkovMeasure":
        space = SFTSpace.from_json(doc)
        if "Q" not in doc:
            raise ValueError("document carries no Markov kernel")
        if "pi" in doc:
            return cls(space, tuple(map(tuple, doc["Q"])), tuple(doc["pi"]))
        return cls.from_matrix(space, doc["Q"])


def _shortest_cycle(space: SFTSpace, s: int) -> Word:
    """Shortest admissible cycle through symbol ``s`` (BFS)."""
    parent = {t: s for t in space.successors(s)}
    frontier = list(space.successors(s))
    if s in parent:
        return (s,)
    while frontier:
        nxt = []
        for t in frontier:
            for u in space.successors(t):
                if u == s:
                    path = [t]
                    while path[-1] != s:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path))
                if u not in parent:
                    parent[u] = t
                    nxt.append(u)
        frontier = nxt
    raise ValueError(f"no cycle through symbol {s}")  # pragma: no cover


def _complete_word(space: SFTSpace, word: Word, core_start: int) -> SymbolicPoint:
    """Extend a finite admissible word to a point by periodic continuation."""
    cyc_l = _shortest_cycle(space, word[0])
    cyc_r = _shortest_cycle(space, word[-1])
    left = cyc_l  # ends right before word[0]: wrap pair (last, word[0]) is the cycle edge
    right = _rot_left(cyc_r)  # starts right after word[-1]
    return SymbolicPoint.make(space, left, word, right, core_start)


def sample_measure(
    mu: MarkovMeasure, count: int, seed: int, depth: int = 64
) -> list[SymbolicPoint]:
    """i.i.d. cylinder-truncated draws from the Markov measure.

    Each draw is an admissible word of length ``depth`` centred on coordinate
    0 (stationary start), completed to a point by periodic continuation.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = np.random.default_rng(seed)
    k = mu.space.k
    pi = np.array(mu.pi)
    Q = np.array(mu.Q)
    out = []
    for _ in range(count):
        syms = [int(rng.choice(k, p=pi))]
        for _ in range(depth - 1):
            syms.append(int(rng.choice(k, p=Q[syms[-1]])))
        out.append(_complete_word(mu.space, tuple(syms), -(depth // 2)))
    return out


def resample_future(
    mu: MarkovMeasure, x: SymbolicPoint, rng, depth: int = 32
) -> SymbolicPoint:
    """Redraw coordinates n >= 1 from the chain: a point on W^u_loc(x)."""
    lo = min(x.core_start, 0)
    Q = np.array(mu.Q)
    syms = list(x.window(lo, 1))
    for _ in range(depth):
        syms.append(int(rng.choice(mu.space.k, p=Q[syms[-1]])))
    left = tuple(x.left[(i + lo - x.core_start) % len(x.left)] for i in range(len(x.left)))
    cyc_r = _shortest_cycle(mu.space, syms[-1])
    return SymbolicPoint.make(mu.space, left, tuple(syms), _rot_left(cyc_r), lo)


def resample_past(
    mu: MarkovMeasure, x: SymbolicPoint, rng, depth: int = 32
) -> SymbolicPoint:
    """Redraw coordinates n <= -1 via the reversed kernel: a point on W^s_loc(x)."""
    hi = max(x.core_start + len(x.core), 0)
    B = np.array(mu.backward_kernel())
    rev = [x[0]]
    for _ in range(depth):
        rev.append(int(rng.choice(mu.space.k, p=B[rev[-1]])))
    syms = list(reversed(rev)) + list(x.window(1, hi + 1))
    r0 = x.core_start + len(x.core)
    right = tuple(x.right[(i + hi + 1 - r0) % len(x.right)] for i in range(len(x.right)))
    cyc_l = _shortest_cycle(mu.space, syms[0])
    return SymbolicPoint.make(mu.space, cyc_l, tuple(syms), right, -depth)


def fixed_point_count(space: SFTSpace, n: int) -> int:
    """Number of points fixed by sigma**n: trace of the n-th matrix power."""
    P = np.array(space.P, dtype=object)
    return int(np.trace(np.linalg.matrix_power(P, n)))
