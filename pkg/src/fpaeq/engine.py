"""Exact interim utilities, best responses and equilibrium verification.

Winning probabilities are computed through the tie-counting dynamic program:
``T[r]`` is the probability that exactly r opponents bid exactly b while all
the others bid strictly below, built up one opponent at a time from the
per-opponent masses (g = ties b, G = strictly below b).  With uniform
tie-breaking the win probability is ``sum_r T[r] / (r+1)``, including the
all-zero tie at b = 0.

Utilities come in two normalizations:

* interim (default) -- expectation over the conditional prior given the
  bidder's own value; this is the quantity in the equilibrium definitions.
* raw -- interim times the bidder's marginal mass, i.e. the unnormalized
  expectation over the joint.  Same argmax, convenient for reproducing
  per-gadget tables of the hardness reduction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence, Union

from .model import (
    ONE,
    ZERO,
    Auction,
    BoxDensity,
    DiscretePrior,
    IIDMarginal,
    JumpStrategy,
    MixedStrategy,
    Profile,
    PureStrategy,
    SymmetricDiscretePrior,
    marginal_mass,
    rat,
)

BidOrMix = Union[Fraction, dict]


@dataclass(frozen=True)
class UtilityQuery:
    bidder: int
    value: Fraction
    bid: BidOrMix
    opponents: Profile
    raw: bool = False


@dataclass(frozen=True)
class BestResponseReport:
    argmax: tuple[Fraction, ...]
    best_utility: Fraction
    margin: Fraction | None  # None when every candidate bid is optimal


@dataclass(frozen=True)
class Violation:
    bidder: int
    value: Fraction
    played: object
    best_bid: Fraction
    gain: Fraction


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    eps: Fraction
    max_gain: Fraction
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# tie-counting DP
# ---------------------------------------------------------------------------

def tie_dp(gs: Sequence[Fraction], Gs: Sequence[Fraction]) -> list[Fraction]:
    """T[r] = P(exactly r of the opponents tie at b, the rest strictly below).

    gs[j] / Gs[j] are opponent j's probabilities of bidding exactly b /
    strictly below b.
    """
    T = [ONE]
    for g, G in zip(gs, Gs):
        nxt = [T[0] * G]
        for k in range(1, len(T)):
            nxt.append(T[k - 1] * g + T[k] * G)
        nxt.append(T[-1] * g)
        T = nxt
    return T


def win_from_ties(T: Sequence[Fraction]) -> Fraction:
    return sum((T[r] / (r + 1) for r in range(len(T))), ZERO)


def _mixed_row(strategy, value: Fraction) -> dict[Fraction, Fraction]:
    if isinstance(strategy, PureStrategy):
        return {strategy.bid_at(value): ONE}
    if isinstance(strategy, MixedStrategy):
        return strategy.row(value)
    raise TypeError(f"need a pure or mixed strategy, got {type(strategy).__name__}")


@lru_cache(maxsize=None)
def _expanded(prior: SymmetricDiscretePrior) -> DiscretePrior:
    from .model import expand_symmetric

    return expand_symmetric(prior)


def _arrangements(block: tuple) -> int:
    """Distinct orderings of a multiset."""
    m = factorial(len(block))
    for v in set(block):
        m //= factorial(block.count(v))
    return m


# ---------------------------------------------------------------------------
# DFPA utilities
# ---------------------------------------------------------------------------

def _dfpa_raw_win_mass(
    prior: DiscretePrior, i: int, v: Fraction, b: Fraction, opponents: Profile
) -> Fraction:
    """sum over the joint of f(v, v_-i) * P(win with bid b); interim H times f_i(v)."""
    acc = ZERO
    for tup, m in prior.support:
        if tup[i] != v:
            continue
        gs, Gs = [], []
        for j in range(prior.n):
            if j == i:
                continue
            row = _mixed_row(opponents.for_bidder(j), tup[j])
            g = row.get(b, ZERO)
            G = sum((w for bb, w in row.items() if bb < b), ZERO)
            if g == 0 and G == 1:
                continue  # surely strictly below: identity factor in the DP
            gs.append(g)
            Gs.append(G)
        acc += m * win_from_ties(tie_dp(gs, Gs))
    return acc


def win_prob_dfpa(
    auction: Auction, i: int, v: Fraction, b: Fraction, opponents: Profile
) -> Fraction:
    """Probability that bidder i wins with bid b, conditioned on value v."""
    v, b = rat(v), rat(b)
    prior = auction.prior
    if isinstance(prior, SymmetricDiscretePrior):
        prior = _expanded(prior)
    fi = marginal_mass(prior, i, v)
    if fi == 0:
        raise ValueError(f"value {v} outside marginal support of bidder {i}")
    return _dfpa_raw_win_mass(prior, i, v, b, opponents) / fi


def utility_dfpa(
    auction: Auction,
    i: int,
    v: Fraction,
    bid: BidOrMix,
    opponents: Profile,
    raw: bool = False,
) -> Fraction:
    """Interim utility of bidding ``bid`` (a bid or a distribution over bids)."""
    v = rat(v)
    prior = auction.prior
    if isinstance(prior, SymmetricDiscretePrior):
        prior = _expanded(prior)
    fi = marginal_mass(prior, i, v)
    if fi == 0:
        raise ValueError(f"value {v} outside marginal support of bidder {i}")
    mix = bid if isinstance(bid, dict) else {rat(bid): ONE}
    total = ZERO
    for b, w in mix.items():
        if w == 0:
            continue
        b = rat(b)
        total += w * (v - b) * _dfpa_raw_win_mass(prior, i, v, b, opponents)
    return total if raw else total / fi


def utility_dfpa_symmetric(
    auction: Auction,
    i: int,
    v: Fraction,
    bid: BidOrMix,
    profile: Profile,
    raw: bool = False,
) -> Fraction:
    """Succinct-representation utility; equals utility_dfpa on the expansion.

    Requires a symmetric profile (one strategy per group).  Each canonical
    tuple contributes once per distinct group-valid permutation that places
    value v at bidder i's slot; that count is the arrangement number of the
    remaining multiset, blockwise.
    """
    v = rat(v)
    prior = auction.prior
    if not isinstance(prior, SymmetricDiscretePrior):
        raise TypeError("utility_dfpa_symmetric needs a SymmetricDiscretePrior")
    if profile.groups is None:
        raise ValueError("symmetric utility requires a per-group profile")
    k = prior.group_of(i)
    mix = bid if isinstance(bid, dict) else {rat(bid): ONE}

    fi = ZERO
    entries = []  # (count, opponent values per group as multisets)
    for tup, p in prior.rep_support:
        blocks = [tuple(tup[m] for m in g) for g in prior.groups]
        if v not in blocks[k]:
            continue
        reduced = list(blocks[k])
        reduced.remove(v)
        cnt = _arrangements(tuple(reduced))
        for g, block in enumerate(blocks):
            if g != k:
                cnt *= _arrangements(block)
        fi += p * cnt
        opp = []
        for g, block in enumerate(blocks):
            vals = reduced if g == k else list(block)
            opp.extend((g, val) for val in vals)
        entries.append((p * cnt, opp))
    if fi == 0:
        raise ValueError(f"value {v} outside marginal support of bidder {i}")

    total = ZERO
    for b, wmix in mix.items():
        if wmix == 0:
            continue
        b = rat(b)
        acc = ZERO
        for mass, opp in entries:
            gs, Gs = [], []
            for g, val in opp:
                row = _mixed_row(profile.strategies[g], val)
                gg = row.get(b, ZERO)
                GG = sum((w for bb, w in row.items() if bb < b), ZERO)
                if gg == 0 and GG == 1:
                    continue
                gs.append(gg)
                Gs.append(GG)
            acc += mass * win_from_ties(tie_dp(gs, Gs))
        total += wmix * (v - b) * acc
    return total if raw else total / fi


# ---------------------------------------------------------------------------
# CFPA utilities
# ---------------------------------------------------------------------------

def _jump_masses(
    strategy: JumpStrategy, jb: int, lo: Fraction, hi: Fraction
) -> tuple[Fraction, Fraction]:
    """(tie, strictly-below) length fractions of [lo,hi] for bid index jb."""
    length = hi - lo
    g = strategy.mass_at_bid(jb, lo, hi) / length
    G = strategy.mass_below_bid(jb, lo, hi) / length
    return g, G


def utility_cfpa(
    auction: Auction,
    i: int,
    v: Fraction,
    b: Fraction,
    opponents: Profile,
    raw: bool = False,
) -> Fraction:
    """Interim utility in a box-density CFPA against jump-strategy opponents.

    Within each conditional-support box the opponents' values are independent
    and uniform per coordinate, so the tie DP runs on per-coordinate length
    fractions.
    """
    v, b = rat(v), rat(b)
    prior = auction.prior
    if isinstance(prior, IIDMarginal):
        prior = prior.as_box_density(auction.n)
    if not isinstance(prior, BoxDensity):
        raise TypeError("utility_cfpa needs a BoxDensity or IIDMarginal prior")
    jb = auction.bids.index(b)

    fi = ZERO
    acc = ZERO
    for lo, hi, w in prior.expanded_boxes:
        if not lo[i] <= v <= hi[i]:
            continue
        mass = w
        degenerate = False
        for j in range(prior.n):
            if j != i:
                if hi[j] == lo[j]:
                    degenerate = True
                    break
                mass *= hi[j] - lo[j]
        if degenerate:
            continue
        fi += mass
        gs, Gs = [], []
        for j in range(prior.n):
            if j == i:
                continue
            strat = opponents.for_bidder(j)
            if not isinstance(strat, JumpStrategy):
                raise TypeError("CFPA opponents must play jump strategies")
            g, G = _jump_masses(strat, jb, lo[j], hi[j])
            gs.append(g)
            Gs.append(G)
        acc += mass * win_from_ties(tie_dp(gs, Gs))
    if fi == 0:
        raise ValueError(f"value {v} outside marginal support of bidder {i}")
    total = (v - b) * acc
    return total if raw else total / fi


def utility_cfpa_symmetric(
    auction: Auction,
    i: int,
    v: Fraction,
    b: Fraction,
    profile: Profile,
    raw: bool = False,
) -> Fraction:
    """Succinct group-symmetric CFPA utility; equals the expanded computation."""
    v, b = rat(v), rat(b)
    prior = auction.prior
    if not isinstance(prior, BoxDensity) or prior.groups is None:
        raise TypeError("utility_cfpa_symmetric needs a grouped BoxDensity")
    if profile.groups is None:
        raise ValueError("symmetric utility requires a per-group profile")
    groups = prior.groups
    k = None
    for g, members in enumerate(groups):
        if i in members:
            k = g
    if k is None:
        raise IndexError(f"bidder {i} not in any group")
    jb = auction.bids.index(b)

    fi = ZERO
    acc = ZERO
    for lo, hi, w in prior.boxes:
        ivs = tuple(zip(lo, hi))
        blocks = [tuple(ivs[m] for m in g) for g in groups]
        for own in sorted(set(blocks[k])):
            if not own[0] <= v <= own[1]:
                continue
            reduced = list(blocks[k])
            reduced.remove(own)
            cnt = _arrangements(tuple(reduced))
            for g, block in enumerate(blocks):
                if g != k:
                    cnt *= _arrangements(block)
            opp = []
            for g, block in enumerate(blocks):
                vals = reduced if g == k else list(block)
                opp.extend((g, iv) for iv in vals)
            mass = w * cnt
            degenerate = False
            for _, (a, c) in opp:
                if c == a:
                    degenerate = True
                    break
                mass *= c - a
            if degenerate:
                continue
            fi += mass
            gs, Gs = [], []
            for g, (a, c) in opp:
                strat = profile.strategies[g]
                if not isinstance(strat, JumpStrategy):
                    raise TypeError("CFPA opponents must play jump strategies")
                gg, GG = _jump_masses(strat, jb, a, c)
                gs.append(gg)
                Gs.append(GG)
            acc += mass * win_from_ties(tie_dp(gs, Gs))
    if fi == 0:
        raise ValueError(f"value {v} outside marginal support of bidder {i}")
    total = (v - b) * acc
    return total if raw else total / fi


# ---------------------------------------------------------------------------
# dispatch helpers
# ---------------------------------------------------------------------------

def utility(
    auction: Auction,
    i: int,
    v: Fraction,
    bid: BidOrMix,
    opponents: Profile,
    raw: bool = False,
) -> Fraction:
    """Interim (or raw) utility, dispatching on the instance kind."""
    prior = auction.prior
    if isinstance(prior, (DiscretePrior, SymmetricDiscretePrior)):
        if isinstance(prior, SymmetricDiscretePrior) and opponents.groups is not None:
            return utility_dfpa_symmetric(auction, i, v, bid, opponents, raw)
        return utility_dfpa(auction, i, v, bid, opponents.expand(auction.n), raw)
    if isinstance(prior, BoxDensity) and prior.groups is not None and opponents.groups is not None:
        return utility_cfpa_symmetric(auction, i, v, rat(bid), opponents, raw)
    return utility_cfpa(auction, i, v, rat(bid), opponents.expand(auction.n), raw)


def evaluate(auction: Auction, query: UtilityQuery) -> Fraction:
    return utility(
        auction, query.bidder, query.value, query.bid, query.opponents, query.raw
    )


def best_response(
    auction: Auction,
    i: int,
    v: Fraction,
    opponents: Profile,
    no_overbidding: bool = True,
    raw: bool = False,
) -> BestResponseReport:
    """Argmax bids, best utility and the margin to the best non-argmax bid."""
    v = rat(v)
    candidates = [b for b in auction.bids if not no_overbidding or b <= v]
    utils = {b: utility(auction, i, v, b, opponents, raw) for b in candidates}
    best = max(utils.values())
    argmax = tuple(b for b in candidates if utils[b] == best)
    rest = [u for b, u in utils.items() if b not in argmax]
    margin = best - max(rest) if rest else None
    return BestResponseReport(argmax=argmax, best_utility=best, margin=margin)


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------

def check_monotone(strategy) -> bool:
    """Nondecreasing bids in value; for mixed rows, ordered supports."""
    if isinstance(strategy, JumpStrategy):
        return True
    if isinstance(strategy, PureStrategy):
        bids = [b for _, b in strategy.mapping]
        return all(b1 <= b2 for b1, b2 in zip(bids, bids[1:]))
    if isinstance(strategy, MixedStrategy):
        rows = strategy.table
        for (_, d1), (_, d2) in zip(rows, rows[1:]):
            hi = max(b for b, w in d1 if w > 0)
            lo = min(b for b, w in d2 if w > 0)
            if hi > lo:
                return False
        return True
    raise TypeError(f"unknown strategy type {type(strategy).__name__}")


def check_affiliation(prior) -> tuple[bool, tuple | None]:
    """Exact affiliation (MTP2) check; returns a violating pair on failure."""
    if isinstance(prior, IIDMarginal):
        return True, None
    if isinstance(prior, SymmetricDiscretePrior):
        prior = _expanded(prior)
    if isinstance(prior, DiscretePrior):
        pts = [t for t, _ in prior.support]
        f = prior.mass
        for a in pts:
            for b in pts:
                join = tuple(max(x, y) for x, y in zip(a, b))
                meet = tuple(min(x, y) for x, y in zip(a, b))
                if f(join) * f(meet) < f(a) * f(b):
                    return False, (a, b)
        return True, None
    if isinstance(prior, BoxDensity):
        axis_cuts = [prior.axis_breakpoints(i) for i in range(prior.n)]
        axis_mids = [
            [Fraction(c1 + c2, 2) for c1, c2 in zip(cuts, cuts[1:])]
            for cuts in axis_cuts
        ]
        cells = [
            pt
            for pt in itertools.product(*axis_mids)
            if prior.density_at(pt) > 0
        ]
        for a in cells:
            for b in cells:
                join = tuple(max(x, y) for x, y in zip(a, b))
                meet = tuple(min(x, y) for x, y in zip(a, b))
                lhs = prior.density_at(join) * prior.density_at(meet)
                rhs = prior.density_at(a) * prior.density_at(b)
                if lhs < rhs:
                    return False, (a, b)
        return True, None
    raise TypeError(f"unsupported prior {type(prior).__name__}")


# ---------------------------------------------------------------------------
# equilibrium verification
# ---------------------------------------------------------------------------

def _discrete_value_points(auction: Auction, i: int):
    prior = auction.prior
    if isinstance(prior, SymmetricDiscretePrior):
        prior = _expanded(prior)
    marg = {}
    for tup, m in prior.support:
        marg[tup[i]] = marg.get(tup[i], ZERO) + m
    return sorted(v for v, m in marg.items() if m > 0)


def _run_sharded(tasks, worker, threads: int):
    """Run per-bidder verification shards, merging results in task order so
    the report is identical regardless of schedule."""
    if threads > 1 and len(tasks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, tasks))
    return [worker(t) for t in tasks]


def _verify_discrete(
    auction: Auction, profile: Profile, eps: Fraction, mixed: bool, threads: int = 1
) -> VerificationReport:
    prior = auction.prior
    symmetric = (
        isinstance(prior, SymmetricDiscretePrior) and profile.groups is not None
    )
    bidders = (
        [g[0] for g in prior.groups] if symmetric else list(range(auction.n))
    )

    def shard(i: int):
        strat = profile.for_bidder(i)
        violations = []
        max_gain = ZERO
        for v in _discrete_value_points(auction, i):
            played = _mixed_row(strat, v) if mixed else {strat.bid_at(v): ONE}
            current = utility(auction, i, v, played, profile)
            best, best_bid = current, None
            for b in auction.bids:
                u = utility(auction, i, v, b, profile)
                if u > best:
                    best, best_bid = u, b
            gain = best - current
            max_gain = max(max_gain, gain)
            if gain > eps:
                violations.append(
                    Violation(
                        bidder=i,
                        value=v,
                        played=tuple(sorted(b for b, w in played.items() if w > 0)),
                        best_bid=best_bid,
                        gain=gain,
                    )
                )
        return max_gain, violations

    shards = _run_sharded(bidders, shard, threads)
    violations = [v for _, vs in shards for v in vs]
    max_gain = max((g for g, _ in shards), default=ZERO)
    return VerificationReport(
        ok=not violations, eps=eps, max_gain=max_gain, violations=tuple(violations)
    )


def _cfpa_cells(auction: Auction, i: int, own: JumpStrategy):
    """Open intervals of constant conditional and constant own bid."""
    prior = auction.prior
    if isinstance(prior, IIDMarginal):
        prior = prior.as_box_density(auction.n)
    cuts = set(prior.axis_breakpoints(i))
    cuts.update(own.thresholds)
    cuts = sorted(cuts)
    return [(a, b) for a, b in zip(cuts, cuts[1:]) if a < b]


def _verify_cfpa(
    auction: Auction, profile: Profile, eps: Fraction, threads: int = 1
) -> VerificationReport:
    prior = auction.prior
    symmetric = (
        isinstance(prior, BoxDensity)
        and prior.groups is not None
        and profile.groups is not None
    )
    bidders = [g[0] for g in prior.groups] if symmetric else list(range(auction.n))
    box_view = prior
    if isinstance(box_view, IIDMarginal):
        box_view = box_view.as_box_density(auction.n)

    def shard(i: int):
        strat = profile.for_bidder(i)
        if not isinstance(strat, JumpStrategy):
            raise TypeError("CFPA verification expects jump strategies")
        violations = []
        max_gain = ZERO
        for lo, hi in _cfpa_cells(auction, i, strat):
            mid = Fraction(lo + hi, 2)
            fi = marginal_mass(box_view, i, mid)
            if fi == 0:
                continue  # cell outside the marginal's support
            # H values are constant across the open cell; utilities are
            # linear in v, so the supremum of any deviation gain over the
            # cell is attained at an endpoint limit.
            cur_bid = strat.bid_at(mid)
            h = {
                b: _cfpa_raw_win_mass(auction, box_view, i, mid, b, profile) / fi
                for b in auction.bids
            }
            h_cur = h[cur_bid]
            for b in auction.bids:
                for vpt in (lo, hi):
                    gain = (vpt - b) * h[b] - (vpt - cur_bid) * h_cur
                    if gain > max_gain:
                        max_gain = gain
                    if gain > eps:
                        violations.append(
                            Violation(
                                bidder=i,
                                value=vpt,
                                played=cur_bid,
                                best_bid=b,
                                gain=gain,
                            )
                        )
        return max_gain, violations

    shards = _run_sharded(bidders, shard, threads)
    violations = [v for _, vs in shards for v in vs]
    max_gain = max((g for g, _ in shards), default=ZERO)
    return VerificationReport(
        ok=not violations, eps=eps, max_gain=max_gain, violations=tuple(violations)
    )


def _cfpa_raw_win_mass(auction, box_view, i, v, b, profile) -> Fraction:
    """H_i(b; v) times f_i(v), summed over the expanded boxes."""
    jb = auction.bids.index(b)
    acc = ZERO
    for lo, hi, w in box_view.expanded_boxes:
        if not lo[i] <= v <= hi[i]:
            continue
        mass = w
        degenerate = False
        for j in range(box_view.n):
            if j != i:
                if hi[j] == lo[j]:
                    degenerate = True
                    break
                mass *= hi[j] - lo[j]
        if degenerate:
            continue
        gs, Gs = [], []
        for j in range(box_view.n):
            if j == i:
                continue
            g, G = _jump_masses(profile.for_bidder(j), jb, lo[j], hi[j])
            gs.append(g)
            Gs.append(G)
        acc += mass * win_from_ties(tie_dp(gs, Gs))
    return acc


def verify_pbne(
    auction: Auction, profile: Profile, eps, threads: int = 1
) -> VerificationReport:
    """Check the epsilon-PBNE condition for every bidder and support value.

    DFPA: every value of positive marginal mass is checked against all bids.
    CFPA: jump-strategy profiles are checked cell-by-cell on the arrangement
    grid of box endpoints and jump thresholds (the almost-everywhere
    criterion; deviation gains are linear per cell so endpoint limits are
    exact).  ``threads`` shards the work per bidder; the report is the same
    for any thread count.
    """
    eps = rat(eps)
    if auction.is_discrete:
        return _verify_discrete(auction, profile, eps, mixed=False, threads=threads)
    return _verify_cfpa(auction, profile, eps, threads=threads)


def verify_mbne(
    auction: Auction, profile: Profile, eps, threads: int = 1
) -> VerificationReport:
    """Mixed-profile verification; comparing against pure deviations suffices."""
    eps = rat(eps)
    if not auction.is_discrete:
        raise TypeError("mixed-strategy verification applies to DFPA instances")
    return _verify_discrete(auction, profile, eps, mixed=True, threads=threads)
