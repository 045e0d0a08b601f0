"""Domain types for first-price auctions with correlated value priors.

Everything is exact: probabilities, values, bids and utilities are
`fractions.Fraction` throughout.  There is no floating-point fast path.

Priors come in four flavours:

* ``DiscretePrior``        -- explicit joint pmf over value tuples (DFPA),
* ``SymmetricDiscretePrior`` -- group-succinct pmf given on canonical tuples,
* ``BoxDensity``           -- piecewise-constant joint density given as
                              weighted hyperrectangles (CFPA),
* ``IIDMarginal``          -- a single piecewise-constant marginal density,
                              shared by all bidders (iid CFPA).

Strategies are value->bid maps (``PureStrategy``), value->bid-distribution
tables (``MixedStrategy``), or monotone step functions encoded by their jump
thresholds (``JumpStrategy``).

All types are immutable after construction; operations are pure functions.
Constructors only coerce types -- semantic invariants (mass sums to one,
canonical ordering, ...) are checked by :func:`validate_instance`, which
returns a report instead of raising.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Iterable, Sequence, Union

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(x) -> Fraction:
    """Coerce an int, 'p/q' string, or Fraction into an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r} (floats are rejected)")


def rat_tuple(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(rat(x) for x in xs)


# ---------------------------------------------------------------------------
# bid space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BidSpace:
    """Finite bidding space B subset of [0,1] with 0 always present."""

    bids: tuple[Fraction, ...]

    def __init__(self, bids: Iterable):
        bids = rat_tuple(bids)
        if not bids:
            raise ValueError("bid space is empty")
        if any(b < 0 or b > 1 for b in bids):
            raise ValueError("bids must lie in [0,1]")
        if any(b2 <= b1 for b1, b2 in zip(bids, bids[1:])):
            raise ValueError("bids must be strictly increasing")
        if bids[0] != 0:
            raise ValueError("bid space must contain 0 as its smallest bid")
        object.__setattr__(self, "bids", bids)

    def __len__(self) -> int:
        return len(self.bids)

    def __iter__(self):
        return iter(self.bids)

    def __getitem__(self, j: int) -> Fraction:
        return self.bids[j]

    def index(self, b: Fraction) -> int:
        return self.bids.index(b)

    def __contains__(self, b) -> bool:
        return rat(b) in self.bids


# ---------------------------------------------------------------------------
# priors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscretePrior:
    """Explicit joint pmf over value tuples."""

    n: int
    value_spaces: tuple[tuple[Fraction, ...], ...]
    support: tuple[tuple[tuple[Fraction, ...], Fraction], ...]

    def __init__(self, n: int, value_spaces, support):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(
            self, "value_spaces", tuple(rat_tuple(vs) for vs in value_spaces)
        )
        object.__setattr__(
            self, "support", tuple((rat_tuple(t), rat(m)) for t, m in support)
        )

    @cached_property
    def pmf(self) -> dict[tuple[Fraction, ...], Fraction]:
        return {t: m for t, m in self.support}

    def mass(self, values: Sequence[Fraction]) -> Fraction:
        return self.pmf.get(tuple(values), ZERO)


@dataclass(frozen=True)
class SymmetricDiscretePrior:
    """Group-succinct joint pmf: canonical tuples in V_>= with probabilities.

    ``groups`` is an ordered partition of bidder indices 0..n-1 into
    contiguous blocks; bidders in a group share ``group_values[g]``.  Each
    canonical tuple must be non-increasing inside every group block, and the
    probabilities must satisfy sum_j m_j * p_j = 1 where m_j counts the
    distinct group-valid permutations of tuple j.
    """

    n: int
    groups: tuple[tuple[int, ...], ...]
    group_values: tuple[tuple[Fraction, ...], ...]
    rep_support: tuple[tuple[tuple[Fraction, ...], Fraction], ...]

    def __init__(self, n: int, groups, group_values, rep_support):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "groups", tuple(tuple(int(i) for i in g) for g in groups))
        object.__setattr__(
            self, "group_values", tuple(rat_tuple(vs) for vs in group_values)
        )
        object.__setattr__(
            self,
            "rep_support",
            tuple((rat_tuple(t), rat(p)) for t, p in rep_support),
        )

    def group_of(self, bidder: int) -> int:
        for g, members in enumerate(self.groups):
            if bidder in members:
                return g
        raise IndexError(f"bidder {bidder} not in any group")

    @cached_property
    def value_spaces(self) -> tuple[tuple[Fraction, ...], ...]:
        spaces = [()] * self.n
        for g, members in enumerate(self.groups):
            for i in members:
                spaces[i] = self.group_values[g]
        return tuple(spaces)


@dataclass(frozen=True)
class BoxDensity:
    """Piecewise-constant joint density: weighted closed hyperrectangles.

    ``boxes`` holds (lo, hi, weight) triples with lo/hi per-coordinate
    endpoints in [0,1].  With ``groups`` set, each listed box is canonical and
    stands for all of its distinct group-valid coordinate permutations, each
    carrying the same weight (mirroring the succinct discrete convention, so
    that total mass is sum_j w_j * m_j * vol(R_j)).
    """

    n: int
    boxes: tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...], Fraction], ...]
    groups: tuple[tuple[int, ...], ...] | None

    def __init__(self, n: int, boxes, groups=None):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(
            self,
            "boxes",
            tuple((rat_tuple(lo), rat_tuple(hi), rat(w)) for lo, hi, w in boxes),
        )
        object.__setattr__(
            self,
            "groups",
            None if groups is None else tuple(tuple(int(i) for i in g) for g in groups),
        )

    @cached_property
    def expanded_boxes(
        self,
    ) -> tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...], Fraction], ...]:
        """All distinct group-valid images of the listed boxes (weights kept)."""
        if self.groups is None:
            return self.boxes
        out = []
        for lo, hi, w in self.boxes:
            for ivs in distinct_group_arrangements(tuple(zip(lo, hi)), self.groups):
                out.append((tuple(a for a, _ in ivs), tuple(b for _, b in ivs), w))
        return tuple(out)

    def density_at(self, point: Sequence[Fraction]) -> Fraction:
        pt = tuple(point)
        total = ZERO
        for lo, hi, w in self.expanded_boxes:
            if all(a <= x <= b for x, a, b in zip(pt, lo, hi)):
                total += w
        return total

    @cached_property
    def total_mass(self) -> Fraction:
        total = ZERO
        for lo, hi, w in self.expanded_boxes:
            vol = ONE
            for a, b in zip(lo, hi):
                vol *= b - a
            total += w * vol
        return total

    def axis_breakpoints(self, i: int) -> tuple[Fraction, ...]:
        pts = {ZERO, ONE}
        for lo, hi, _ in self.expanded_boxes:
            pts.add(lo[i])
            pts.add(hi[i])
        return tuple(sorted(pts))


@dataclass(frozen=True)
class IIDMarginal:
    """Piecewise-constant marginal density shared by all bidders.

    Breakpoints 0 = a_0 < a_1 < ... < a_k = 1 with density p_j on piece
    (a_{j-1}, a_j); valid when sum_j (a_j - a_{j-1}) p_j = 1.
    """

    breakpoints: tuple[Fraction, ...]
    densities: tuple[Fraction, ...]

    def __init__(self, breakpoints, densities):
        object.__setattr__(self, "breakpoints", rat_tuple(breakpoints))
        object.__setattr__(self, "densities", rat_tuple(densities))

    @cached_property
    def total_mass(self) -> Fraction:
        a = self.breakpoints
        return sum(
            (a[j + 1] - a[j]) * p for j, p in enumerate(self.densities)
        )

    def cdf(self, x: Fraction) -> Fraction:
        """Exact marginal cdf, evaluated piecewise."""
        a = self.breakpoints
        acc = ZERO
        for j, p in enumerate(self.densities):
            left, right = a[j], a[j + 1]
            if x <= left:
                break
            acc += p * (min(x, right) - left)
        return acc

    def density(self, x: Fraction) -> Fraction:
        """Density at x; pieces are open, breakpoints take the left piece."""
        a = self.breakpoints
        for j, p in enumerate(self.densities):
            if a[j] < x <= a[j + 1]:
                return p
        return self.densities[0] if x == 0 else ZERO

    @cached_property
    def support_left(self) -> Fraction:
        """Leftmost point of the marginal's support."""
        for j, p in enumerate(self.densities):
            if p > 0:
                return self.breakpoints[j]
        raise ValueError("marginal has empty support")

    def as_box_density(self, n: int) -> BoxDensity:
        """Expand the product of n iid marginals into a plain BoxDensity."""
        pieces = [
            (self.breakpoints[j], self.breakpoints[j + 1], p)
            for j, p in enumerate(self.densities)
            if p > 0
        ]
        boxes = []
        for combo in itertools.product(pieces, repeat=n):
            lo = tuple(c[0] for c in combo)
            hi = tuple(c[1] for c in combo)
            w = ONE
            for c in combo:
                w *= c[2]
            boxes.append((lo, hi, w))
        return BoxDensity(n, boxes, None)


Prior = Union[DiscretePrior, SymmetricDiscretePrior, BoxDensity, IIDMarginal]


@dataclass(frozen=True)
class Auction:
    """A first-price auction: a bidding space paired with a value prior."""

    bids: BidSpace
    prior: Prior
    n: int

    def __init__(self, bids: BidSpace, prior: Prior, n: int | None = None):
        if not isinstance(bids, BidSpace):
            bids = BidSpace(bids)
        if n is None:
            n = getattr(prior, "n", None)
            if n is None:
                raise ValueError("bidder count required for IIDMarginal priors")
        object.__setattr__(self, "bids", bids)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "n", int(n))

    @property
    def kind(self) -> str:
        return {
            DiscretePrior: "dfpa",
            SymmetricDiscretePrior: "dfpa-sym",
            BoxDensity: "cfpa-box",
            IIDMarginal: "cfpa-iid",
        }[type(self.prior)]

    @property
    def is_discrete(self) -> bool:
        return isinstance(self.prior, (DiscretePrior, SymmetricDiscretePrior))


# ---------------------------------------------------------------------------
# strategies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PureStrategy:
    """Total map from a bidder's values to bids."""

    bidder: int
    mapping: tuple[tuple[Fraction, Fraction], ...]

    def __init__(self, bidder: int, mapping):
        object.__setattr__(self, "bidder", int(bidder))
        if isinstance(mapping, dict):
            mapping = sorted(mapping.items())
        object.__setattr__(
            self, "mapping", tuple(sorted((rat(v), rat(b)) for v, b in mapping))
        )

    @cached_property
    def as_dict(self) -> dict[Fraction, Fraction]:
        return dict(self.mapping)

    def bid_at(self, v: Fraction) -> Fraction:
        return self.as_dict[v]

    def as_mixed(self) -> "MixedStrategy":
        return MixedStrategy(
            self.bidder, [(v, [(b, ONE)]) for v, b in self.mapping]
        )


@dataclass(frozen=True)
class MixedStrategy:
    """Value -> distribution over bids, one row per value."""

    bidder: int
    table: tuple[tuple[Fraction, tuple[tuple[Fraction, Fraction], ...]], ...]

    def __init__(self, bidder: int, table):
        object.__setattr__(self, "bidder", int(bidder))
        if isinstance(table, dict):
            table = sorted(table.items())
        rows = []
        for v, dist in table:
            if isinstance(dist, dict):
                dist = sorted(dist.items())
            rows.append((rat(v), tuple(sorted((rat(b), rat(w)) for b, w in dist))))
        object.__setattr__(self, "table", tuple(sorted(rows)))

    @cached_property
    def as_dict(self) -> dict[Fraction, dict[Fraction, Fraction]]:
        return {v: dict(dist) for v, dist in self.table}

    def row(self, v: Fraction) -> dict[Fraction, Fraction]:
        return self.as_dict[v]

    def support_at(self, v: Fraction) -> tuple[Fraction, ...]:
        return tuple(b for b, w in sorted(self.row(v).items()) if w > 0)


@dataclass(frozen=True)
class JumpStrategy:
    """Monotone step strategy given by jump thresholds over a bid space.

    ``thresholds`` has length |B|+1 with 0 = x^1 <= ... <= x^{|B|+1} = 1 and
    the no-overbidding constraint x^j >= b_j.  Bid b_j is played on
    (x^j, x^{j+1}]; the threshold point x^j itself takes the lower bid
    b_{j-1}, a measure-zero convention fixed for determinism.
    """

    bids: BidSpace
    thresholds: tuple[Fraction, ...]

    def __init__(self, bids, thresholds):
        if not isinstance(bids, BidSpace):
            bids = BidSpace(bids)
        object.__setattr__(self, "bids", bids)
        object.__setattr__(self, "thresholds", rat_tuple(thresholds))

    def bid_at(self, v: Fraction) -> Fraction:
        v = rat(v)
        x = self.thresholds
        for j in range(len(self.bids) - 1, -1, -1):
            if v > x[j]:
                return self.bids[j]
        return self.bids[0]

    def mass_at_bid(self, j: int, lo: Fraction, hi: Fraction) -> Fraction:
        """Length of [lo,hi] mapped to exactly bid b_j."""
        x = self.thresholds
        return max(ZERO, min(hi, x[j + 1]) - max(lo, x[j]))

    def mass_below_bid(self, j: int, lo: Fraction, hi: Fraction) -> Fraction:
        """Length of [lo,hi] mapped to a bid strictly below b_j."""
        x = self.thresholds
        return max(ZERO, min(hi, x[j]) - lo)


Strategy = Union[PureStrategy, MixedStrategy, JumpStrategy]


@dataclass(frozen=True)
class Profile:
    """One strategy per bidder, or one per group for symmetric profiles."""

    strategies: tuple[Strategy, ...]
    groups: tuple[tuple[int, ...], ...] | None = None

    def __init__(self, strategies, groups=None):
        object.__setattr__(self, "strategies", tuple(strategies))
        object.__setattr__(
            self,
            "groups",
            None if groups is None else tuple(tuple(int(i) for i in g) for g in groups),
        )

    @property
    def symmetric(self) -> bool:
        return self.groups is not None

    def for_bidder(self, i: int) -> Strategy:
        if self.groups is None:
            return self.strategies[i]
        for g, members in enumerate(self.groups):
            if i in members:
                return self.strategies[g]
        raise IndexError(f"bidder {i} not covered by profile groups")

    def expand(self, n: int) -> "Profile":
        """Per-bidder view of a (possibly symmetric) profile."""
        if self.groups is None:
            return self
        return Profile([self.for_bidder(i) for i in range(n)])


# ---------------------------------------------------------------------------
# combinatorics for group-symmetric representations
# ---------------------------------------------------------------------------

def group_blocks(tup: Sequence, groups: Sequence[Sequence[int]]) -> list[tuple]:
    return [tuple(tup[i] for i in g) for g in groups]


def is_canonical(tup: Sequence, groups: Sequence[Sequence[int]]) -> bool:
    """Non-increasing inside every group block."""
    for block in group_blocks(tup, groups):
        if any(block[i] < block[i + 1] for i in range(len(block) - 1)):
            return False
    return True


def multiplicity(tup: Sequence, groups: Sequence[Sequence[int]]) -> int:
    """Number of distinct group-valid permutations of a canonical tuple.

    Equals prod_g n_g! / prod_{values v} (count of v in block)!.
    """
    if not is_canonical(tup, groups):
        raise ValueError(f"tuple {tup} is not canonical for groups {groups}")
    m = 1
    for block in group_blocks(tup, groups):
        m *= factorial(len(block))
        for v in set(block):
            m //= factorial(block.count(v))
    return m


def distinct_group_arrangements(
    tup: Sequence, groups: Sequence[Sequence[int]]
) -> list[tuple]:
    """All distinct tuples reachable by permuting entries within groups."""
    block_arrangements = []
    for g in groups:
        block = [tup[i] for i in g]
        block_arrangements.append(sorted(set(itertools.permutations(block))))
    out = []
    for combo in itertools.product(*block_arrangements):
        arranged = list(tup)
        for g, block in zip(groups, combo):
            for pos, i in enumerate(g):
                arranged[i] = block[pos]
        out.append(tuple(arranged))
    return sorted(set(out))


def expand_symmetric(sym: SymmetricDiscretePrior) -> DiscretePrior:
    """Explicit prior: every canonical tuple expanded into its m_j distinct
    group-valid permutations, each carrying probability p_j."""
    support = []
    for tup, p in sym.rep_support:
        for arranged in distinct_group_arrangements(tup, sym.groups):
            support.append((arranged, p))
    return DiscretePrior(sym.n, sym.value_spaces, support)


# ---------------------------------------------------------------------------
# marginals and conditionals
# ---------------------------------------------------------------------------

def marginal(prior: Prior, i: int, n: int | None = None):
    """Marginal of bidder i: a value->mass dict for discrete priors, an
    IIDMarginal-shaped piecewise-constant density for continuous ones."""
    if isinstance(prior, SymmetricDiscretePrior):
        prior = expand_symmetric(prior)
    if isinstance(prior, DiscretePrior):
        if not 0 <= i < prior.n:
            raise IndexError(f"bidder index {i} out of range")
        out: dict[Fraction, Fraction] = {}
        for tup, m in prior.support:
            out[tup[i]] = out.get(tup[i], ZERO) + m
        return dict(sorted(out.items()))
    if isinstance(prior, IIDMarginal):
        return prior
    if isinstance(prior, BoxDensity):
        if not 0 <= i < prior.n:
            raise IndexError(f"bidder index {i} out of range")
        cuts = prior.axis_breakpoints(i)
        densities = []
        for lo_c, hi_c in zip(cuts, cuts[1:]):
            mid_num = lo_c + hi_c
            d = ZERO
            for lo, hi, w in prior.expanded_boxes:
                if 2 * lo[i] <= mid_num <= 2 * hi[i]:
                    sect = w
                    for j in range(prior.n):
                        if j != i:
                            sect *= hi[j] - lo[j]
                    d += sect
            densities.append(d)
        return IIDMarginal(cuts, densities)
    raise TypeError(f"unsupported prior: {type(prior).__name__}")


def marginal_mass(prior: Prior, i: int, v: Fraction) -> Fraction:
    """f_i(v) for discrete priors / marginal density at v for continuous.

    Boxes are closed, so a value on a shared face collects both sides; this
    measure-zero convention matches the utility computations.
    """
    v = rat(v)
    if isinstance(prior, BoxDensity):
        total = ZERO
        for lo, hi, w in prior.expanded_boxes:
            if lo[i] <= v <= hi[i]:
                sect = w
                for j in range(prior.n):
                    if j != i:
                        sect *= hi[j] - lo[j]
                total += sect
        return total
    m = marginal(prior, i)
    if isinstance(m, IIDMarginal):
        return m.density(v)
    return m.get(v, ZERO)


def conditional(prior: Prior, i: int, v: Fraction):
    """Beliefs of bidder i about opponents, given her own value v.

    Discrete: dict mapping opponent value tuples to conditional masses.
    Boxes/iid: a BoxDensity over the n-1 opponent coordinates.
    """
    v = rat(v)
    if isinstance(prior, SymmetricDiscretePrior):
        prior = expand_symmetric(prior)
    if isinstance(prior, DiscretePrior):
        fi = marginal_mass(prior, i, v)
        if fi == 0:
            raise ValueError(f"value {v} outside marginal support of bidder {i}")
        out = {}
        for tup, m in prior.support:
            if tup[i] == v:
                rest = tup[:i] + tup[i + 1:]
                out[rest] = out.get(rest, ZERO) + m / fi
        return dict(sorted(out.items()))
    if isinstance(prior, IIDMarginal):
        raise TypeError(
            "conditional over an IIDMarginal needs the bidder count; "
            "convert with as_box_density(n) first"
        )
    if isinstance(prior, BoxDensity):
        fi = marginal_mass(prior, i, v)
        if fi == 0:
            raise ValueError(f"value {v} outside marginal support of bidder {i}")
        boxes = []
        for lo, hi, w in prior.expanded_boxes:
            if lo[i] <= v <= hi[i]:
                lo_rest = lo[:i] + lo[i + 1:]
                hi_rest = hi[:i] + hi[i + 1:]
                boxes.append((lo_rest, hi_rest, w / fi))
        return BoxDensity(prior.n - 1, boxes, None)
    raise TypeError(f"unsupported prior: {type(prior).__name__}")


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _check_discrete(prior: DiscretePrior, errs: list[str]) -> None:
    if len(prior.value_spaces) != prior.n:
        errs.append(f"expected {prior.n} value spaces, got {len(prior.value_spaces)}")
        return
    for i, vs in enumerate(prior.value_spaces):
        if any(v < 0 or v > 1 for v in vs):
            errs.append(f"value space {i}: values outside [0,1]")
        if any(b <= a for a, b in zip(vs, vs[1:])):
            errs.append(f"value space {i}: not strictly increasing")
    seen = set()
    total = ZERO
    for k, (tup, m) in enumerate(prior.support):
        if len(tup) != prior.n:
            errs.append(f"support[{k}]: tuple arity {len(tup)} != n={prior.n}")
            continue
        if m <= 0:
            errs.append(f"support[{k}]: mass {m} not strictly positive")
        if tup in seen:
            errs.append(f"support[{k}]: duplicate tuple {tup}")
        seen.add(tup)
        for i, v in enumerate(tup):
            if v not in prior.value_spaces[i]:
                errs.append(f"support[{k}]: component {i} value {v} not in V_{i}")
        total += m
    if total != 1:
        errs.append(f"total mass {total} != 1")


def _check_symmetric(prior: SymmetricDiscretePrior, errs: list[str]) -> None:
    flat = sorted(i for g in prior.groups for i in g)
    if flat != list(range(prior.n)):
        errs.append(f"groups {prior.groups} do not partition 0..{prior.n - 1}")
        return
    if len(prior.group_values) != len(prior.groups):
        errs.append("one value space required per group")
        return
    total = ZERO
    seen = set()
    for k, (tup, p) in enumerate(prior.rep_support):
        if len(tup) != prior.n:
            errs.append(f"rep_support[{k}]: tuple arity {len(tup)} != n={prior.n}")
            continue
        if p <= 0:
            errs.append(f"rep_support[{k}]: probability {p} not strictly positive")
        if not is_canonical(tup, prior.groups):
            errs.append(f"rep_support[{k}]: tuple {tup} not canonical (non-increasing per group)")
            continue
        if tup in seen:
            errs.append(f"rep_support[{k}]: duplicate canonical tuple {tup}")
        seen.add(tup)
        for g, members in enumerate(prior.groups):
            for i in members:
                if tup[i] not in prior.group_values[g]:
                    errs.append(
                        f"rep_support[{k}]: component {i} value {tup[i]} not in group {g} values"
                    )
        total += multiplicity(tup, prior.groups) * p
    if total != 1:
        errs.append(f"total mass sum m_j p_j = {total} != 1")


def _check_boxes(prior: BoxDensity, errs: list[str]) -> None:
    if prior.groups is not None:
        flat = sorted(i for g in prior.groups for i in g)
        if flat != list(range(prior.n)):
            errs.append(f"groups {prior.groups} do not partition 0..{prior.n - 1}")
            return
    for k, (lo, hi, w) in enumerate(prior.boxes):
        if len(lo) != prior.n or len(hi) != prior.n:
            errs.append(f"box[{k}]: arity != n={prior.n}")
            continue
        if w < 0:
            errs.append(f"box[{k}]: negative weight {w}")
        for a, b in zip(lo, hi):
            if not (0 <= a <= b <= 1):
                errs.append(f"box[{k}]: interval [{a},{b}] invalid in [0,1]")
        if prior.groups is not None and not is_canonical(
            tuple(zip(lo, hi)), prior.groups
        ):
            errs.append(f"box[{k}]: intervals not canonical (non-increasing per group)")
    if not errs and prior.total_mass != 1:
        errs.append(f"total mass {prior.total_mass} != 1")


def _check_iid(prior: IIDMarginal, errs: list[str]) -> None:
    a = prior.breakpoints
    if len(a) < 2 or a[0] != 0 or a[-1] != 1:
        errs.append("breakpoints must run from 0 to 1")
        return
    if any(y <= x for x, y in zip(a, a[1:])):
        errs.append("breakpoints must be strictly increasing")
        return
    if len(prior.densities) != len(a) - 1:
        errs.append("need one density per piece")
        return
    if any(p < 0 for p in prior.densities):
        errs.append("densities must be nonnegative")
    if prior.total_mass != 1:
        errs.append(f"total mass {prior.total_mass} != 1")


def validate_instance(instance) -> ValidationReport:
    """Check all type invariants; returns a report rather than raising."""
    prior = instance.prior if isinstance(instance, Auction) else instance
    errs: list[str] = []
    if isinstance(prior, DiscretePrior):
        _check_discrete(prior, errs)
    elif isinstance(prior, SymmetricDiscretePrior):
        _check_symmetric(prior, errs)
    elif isinstance(prior, BoxDensity):
        _check_boxes(prior, errs)
    elif isinstance(prior, IIDMarginal):
        _check_iid(prior, errs)
    else:
        errs.append(f"unknown instance type {type(prior).__name__}")
    return ValidationReport(ok=not errs, violations=tuple(errs))


def validate_strategy(strategy: Strategy, auction: Auction, errs=None) -> ValidationReport:
    """Check a strategy against an auction's bid and value spaces."""
    errs = [] if errs is None else errs
    B = auction.bids
    if isinstance(strategy, PureStrategy):
        vs = _value_space(auction, strategy.bidder)
        if vs is not None and tuple(v for v, _ in strategy.mapping) != vs:
            errs.append(f"pure strategy of bidder {strategy.bidder} not total over V_i")
        for v, b in strategy.mapping:
            if b not in B:
                errs.append(f"bid {b} at value {v} not in bid space")
    elif isinstance(strategy, MixedStrategy):
        vs = _value_space(auction, strategy.bidder)
        if vs is not None and tuple(v for v, _ in strategy.table) != vs:
            errs.append(f"mixed strategy of bidder {strategy.bidder} not total over V_i")
        for v, dist in strategy.table:
            tot = ZERO
            for b, w in dist:
                if b not in B:
                    errs.append(f"bid {b} at value {v} not in bid space")
                if w < 0 or w > 1:
                    errs.append(f"weight {w} at value {v} outside [0,1]")
                tot += w
            if tot != 1:
                errs.append(f"row at value {v} sums to {tot} != 1")
    elif isinstance(strategy, JumpStrategy):
        x = strategy.thresholds
        if len(x) != len(strategy.bids) + 1:
            errs.append(f"need {len(strategy.bids) + 1} thresholds, got {len(x)}")
        else:
            if x[0] != 0 or x[-1] != 1:
                errs.append("thresholds must start at 0 and end at 1")
            if any(b < a for a, b in zip(x, x[1:])):
                errs.append("thresholds must be nondecreasing")
            for j, b in enumerate(strategy.bids):
                if x[j] < b:
                    errs.append(f"threshold x^{j + 1}={x[j]} below bid {b} (overbidding)")
    else:
        errs.append(f"unknown strategy type {type(strategy).__name__}")
    return ValidationReport(ok=not errs, violations=tuple(errs))


def _value_space(auction: Auction, bidder: int):
    prior = auction.prior
    if isinstance(prior, DiscretePrior):
        return prior.value_spaces[bidder]
    if isinstance(prior, SymmetricDiscretePrior):
        return prior.value_spaces[bidder]
    return None
