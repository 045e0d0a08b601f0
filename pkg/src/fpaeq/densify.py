"""Canonical continuous-bid equilibrium and the bid-densification solver.

For symmetric priors the continuous-bid first-price auction has a classical
symmetric equilibrium bidding function

    beta(v) = v - integral_{vlo}^{v} L_v(y) dy,
    L_v(y)  = exp(-integral_y^v g_t(t)/G_t(t) dt),

where G_v is the cdf of the opponents' maximum value conditioned on one's own
value being v.  For piecewise-constant priors everything here is exactly
computable: G_v is a piecewise polynomial of degree <= n-1, L_v is a product
of rational cdf ratios piece by piece, and the integrals reduce to polynomial
antiderivatives.  The solver inverts beta approximately on the instance's
discrete bid grid (bisection with an exact beta oracle) and assembles a
monotone step strategy that underapproximates beta; the resulting profile is
an approximate equilibrium of the discrete-bid auction with a certified bound
2*gamma*(delta + 2*eps).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    ONE,
    ZERO,
    Auction,
    BoxDensity,
    IIDMarginal,
    JumpStrategy,
    Profile,
    marginal,
    rat,
)
from . import engine


class UnsupportedPrior(ValueError):
    """Raised when the densification pipeline cannot handle the prior
    (general SAPV without full support is an open problem)."""


# ---------------------------------------------------------------------------
# exact piecewise polynomials
# ---------------------------------------------------------------------------

def _poly_eval(coeffs, x: Fraction) -> Fraction:
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_mul(a, b):
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return tuple(out)


def _poly_add(a, b):
    n = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO)
        for i in range(n)
    )


def _poly_antiderivative(coeffs):
    return (ZERO,) + tuple(c / (k + 1) for k, c in enumerate(coeffs))


@dataclass(frozen=True)
class PiecewisePoly:
    """Exact piecewise polynomial on [breakpoints[0], breakpoints[-1]].

    Piece j covers [breakpoints[j], breakpoints[j+1]] with coefficients in
    ascending powers of the absolute coordinate.
    """

    breakpoints: tuple[Fraction, ...]
    coeffs: tuple[tuple[Fraction, ...], ...]

    def piece_index(self, x: Fraction) -> int:
        bp = self.breakpoints
        if not bp[0] <= x <= bp[-1]:
            raise ValueError(f"{x} outside [{bp[0]}, {bp[-1]}]")
        for j in range(len(self.coeffs)):
            if x <= bp[j + 1]:
                return j
        return len(self.coeffs) - 1

    def __call__(self, x) -> Fraction:
        x = rat(x)
        return _poly_eval(self.coeffs[self.piece_index(x)], x)

    def derivative(self) -> "PiecewisePoly":
        return PiecewisePoly(
            self.breakpoints,
            tuple(
                tuple((k + 1) * c for k, c in enumerate(cs[1:])) or (ZERO,)
                for cs in self.coeffs
            ),
        )

    def integrate(self, a: Fraction, b: Fraction) -> Fraction:
        a, b = rat(a), rat(b)
        if a > b:
            return -self.integrate(b, a)
        total = ZERO
        bp = self.breakpoints
        for j, cs in enumerate(self.coeffs):
            lo, hi = max(a, bp[j]), min(b, bp[j + 1])
            if lo >= hi:
                continue
            anti = _poly_antiderivative(cs)
            total += _poly_eval(anti, hi) - _poly_eval(anti, lo)
        return total


# ---------------------------------------------------------------------------
# conditional maximum-order-statistic cdf
# ---------------------------------------------------------------------------

def max_order_cdf(boxes: BoxDensity, v) -> PiecewisePoly:
    """Cdf of max of the other bidders' values given own value v (bidder 0).

    G_v(y) = (1/f_1(v)) * sum over boxes containing v on axis 0 of
             w * prod_{i>=1} |[0,y] cap [lo_i, hi_i]|,
    a degree <= n-1 piecewise polynomial in y.
    """
    v = rat(v)
    relevant = [
        (lo, hi, w)
        for lo, hi, w in boxes.expanded_boxes
        if lo[0] <= v <= hi[0] and w > 0
    ]
    f1 = ZERO
    for lo, hi, w in relevant:
        m = w
        for i in range(1, boxes.n):
            m *= hi[i] - lo[i]
        f1 += m
    if f1 == 0:
        raise ValueError(f"value {v} outside marginal support")

    cuts = {ZERO, ONE}
    for lo, hi, _ in relevant:
        cuts.update(lo[1:])
        cuts.update(hi[1:])
    cuts = tuple(sorted(cuts))

    pieces = []
    for c1, c2 in zip(cuts, cuts[1:]):
        total = (ZERO,)
        for lo, hi, w in relevant:
            prod = (w / f1,)
            dead = False
            for i in range(1, boxes.n):
                a, b = lo[i], hi[i]
                if c2 <= a:
                    dead = True
                    break
                if c1 >= b:
                    prod = _poly_mul(prod, (b - a,))
                else:
                    prod = _poly_mul(prod, (-a, ONE))
            if not dead:
                total = _poly_add(total, prod)
        pieces.append(total)
    return PiecewisePoly(cuts, tuple(pieces))


# ---------------------------------------------------------------------------
# canonical equilibrium bidding function
# ---------------------------------------------------------------------------

def _require_symmetric_boxes(prior: BoxDensity) -> None:
    if prior.groups is not None:
        if len(prior.groups) != 1:
            raise UnsupportedPrior("canonical equilibrium needs one symmetric group")
        return
    expanded = set(prior.expanded_boxes)
    for lo, hi, w in prior.expanded_boxes:
        ivs = tuple(zip(lo, hi))
        for perm in itertools.permutations(range(prior.n)):
            p = tuple(ivs[k] for k in perm)
            if (tuple(a for a, _ in p), tuple(b for _, b in p), w) not in expanded:
                raise UnsupportedPrior("box list is not permutation symmetric")


def _sapv_marginal_pieces(prior: BoxDensity):
    """Full-support marginal as (breakpoints, densities); error on zero pieces."""
    marg = marginal(prior, 0)
    if any(p <= 0 for p in marg.densities):
        raise UnsupportedPrior(
            "SAPV densification requires full support (zero-density marginal piece)"
        )
    return marg.breakpoints, marg.densities


def eval_beta_sapv(boxes: BoxDensity, x) -> Fraction:
    """Exact canonical-equilibrium bid at value x for a full-support
    symmetric box prior: x minus the integral of the recursively-evaluated
    L function over [0, x]."""
    x = rat(x)
    _require_symmetric_boxes(boxes)
    bp, _ = _sapv_marginal_pieces(boxes)
    if x < 0 or x > 1:
        raise ValueError("value outside [0,1]")
    if x == 0:
        return ZERO

    # top piece: the one with a_{k-1} < x <= a_k
    k_v = next(j for j in range(len(bp) - 1) if bp[j] < x <= bp[j + 1])
    reps = [Fraction(bp[j] + bp[j + 1], 2) for j in range(len(bp) - 1)]
    gs = [max_order_cdf(boxes, reps[j]) for j in range(k_v + 1)]

    g_top = gs[k_v]
    gx = g_top(x)
    integral = g_top.integrate(bp[k_v], x) / gx
    l_at = g_top(bp[k_v]) / gx  # L_x at the top piece's left endpoint
    for kappa in range(k_v - 1, -1, -1):
        g = gs[kappa]
        right = g(bp[kappa + 1])
        if right == 0:
            break  # everything below contributes zero (L vanishes)
        integral += g.integrate(bp[kappa], bp[kappa + 1]) / right * l_at
        l_at *= g(bp[kappa]) / right
    return x - integral


def affiliation_L(boxes: BoxDensity, v, y) -> Fraction:
    """Exact L_v(y) for the canonical equilibrium of a full-support
    symmetric box prior, via the same piecewise recursion as eval_beta_sapv."""
    v, y = rat(v), rat(y)
    if not 0 <= y <= v <= 1:
        raise ValueError("need 0 <= y <= v <= 1")
    bp, _ = _sapv_marginal_pieces(boxes)
    if v == 0:
        return ONE if y == v else ZERO
    k_v = next(j for j in range(len(bp) - 1) if bp[j] < v <= bp[j + 1])
    reps = [Fraction(bp[j] + bp[j + 1], 2) for j in range(len(bp) - 1)]

    g_top = max_order_cdf(boxes, reps[k_v])
    if y >= bp[k_v]:
        return g_top(y) / g_top(v)
    l_at = g_top(bp[k_v]) / g_top(v)
    for kappa in range(k_v - 1, -1, -1):
        g = max_order_cdf(boxes, reps[kappa])
        right = g(bp[kappa + 1])
        if right == 0:
            return ZERO
        if y >= bp[kappa]:
            return g(y) / right * l_at
        l_at *= g(bp[kappa]) / right
    return l_at


def eval_beta_iid(marg: IIDMarginal, n: int, x) -> Fraction:
    """Exact canonical-equilibrium bid for n iid bidders with a
    piecewise-constant marginal; values outside the support evaluate at the
    last support point before x."""
    x = rat(x)
    a, p = marg.breakpoints, marg.densities
    vlo = marg.support_left
    if x < vlo:
        raise ValueError(f"value {x} below the support's left end {vlo}")
    if x == vlo:
        return vlo

    def piece_of(t: Fraction) -> int:
        return next(j for j in range(len(p)) if a[j] < t <= a[j + 1])

    j = piece_of(x)
    if p[j] == 0:
        # constant outside the support: last in-support breakpoint before x
        j = max(k for k in range(len(p)) if p[k] > 0 and a[k + 1] <= x)
        x = a[j + 1]
        if x == vlo:
            return vlo
    Fx = marg.cdf(x)
    acc = ZERO
    for k in range(j):
        Fl, Fr = marg.cdf(a[k]), marg.cdf(a[k + 1])
        if p[k] > 0:
            acc += (Fr**n - Fl**n) / (n * p[k])
        else:
            acc += (a[k + 1] - a[k]) * Fl ** (n - 1)
    acc += (Fx**n - marg.cdf(a[j]) ** n) / (n * p[j])
    return x - acc / Fx ** (n - 1)


def eval_beta(auction: Auction, x) -> Fraction:
    prior = auction.prior
    if isinstance(prior, IIDMarginal):
        return eval_beta_iid(prior, auction.n, x)
    if isinstance(prior, BoxDensity):
        return eval_beta_sapv(prior, x)
    raise TypeError("canonical equilibrium applies to continuous instances")


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsProfile:
    mode: str  # "iid" | "sapv"
    phi_lo: Fraction | None  # joint density lower bound (sapv only)
    phi_hi: Fraction  # density upper bound (joint for sapv, marginal for iid)
    gamma: Fraction  # concentration constant of the equilibrium bid of Y1
    lipschitz: Fraction  # upper bound on beta'
    v_lo: Fraction  # left end of the marginal support
    delta: Fraction  # bid-space denseness: max gap of B union {1}


def bid_denseness(auction: Auction) -> Fraction:
    pts = sorted(set(auction.bids) | {ONE})
    return max(b - a for a, b in zip(pts, pts[1:]))


def _sapv_density_range(prior: BoxDensity) -> tuple[Fraction, Fraction]:
    axis_cuts = [prior.axis_breakpoints(i) for i in range(prior.n)]
    axis_mids = [
        [Fraction(c1 + c2, 2) for c1, c2 in zip(cuts, cuts[1:])] for cuts in axis_cuts
    ]
    lo = hi = None
    for pt in itertools.product(*axis_mids):
        d = prior.density_at(pt)
        lo = d if lo is None else min(lo, d)
        hi = d if hi is None else max(hi, d)
    return lo, hi


def lipschitz_bound(auction: Auction) -> Fraction:
    """Upper bound on the canonical bidding function's derivative."""
    prior = auction.prior
    n = auction.n
    if isinstance(prior, IIDMarginal):
        a, p = prior.breakpoints, prior.densities
        pos = [q for q in p if q > 0]
        gaps = [a[j + 1] - a[j] for j in range(len(p))]
        return n * (max(gaps) / min(gaps)) * (max(pos) / min(pos))
    if isinstance(prior, BoxDensity):
        phi_lo, phi_hi = _sapv_density_range(prior)
        if phi_lo <= 0:
            raise UnsupportedPrior("Lipschitz bound needs a full-support prior")
        return (n - 1) * phi_hi / phi_lo
    raise TypeError("continuous instances only")


def bounds_profile(auction: Auction) -> BoundsProfile:
    prior = auction.prior
    n = auction.n
    if isinstance(prior, IIDMarginal):
        phi_hi = max(prior.densities)
        return BoundsProfile(
            mode="iid",
            phi_lo=None,
            phi_hi=phi_hi,
            gamma=n * phi_hi,
            lipschitz=lipschitz_bound(auction),
            v_lo=prior.support_left,
            delta=bid_denseness(auction),
        )
    if isinstance(prior, BoxDensity):
        _require_symmetric_boxes(prior)
        phi_lo, phi_hi = _sapv_density_range(prior)
        if phi_lo <= 0:
            raise UnsupportedPrior(
                "SAPV densification requires a (phi_lo, phi_hi)-bounded prior "
                "with full support"
            )
        return BoundsProfile(
            mode="sapv",
            phi_lo=phi_lo,
            phi_hi=phi_hi,
            gamma=2 * (n - 1) * (phi_hi / phi_lo) ** 2,
            lipschitz=(n - 1) * phi_hi / phi_lo,
            v_lo=ZERO,
            delta=bid_denseness(auction),
        )
    raise TypeError("continuous instances only")


# ---------------------------------------------------------------------------
# approximate inverter and the solver
# ---------------------------------------------------------------------------

def _ceil_log2(q: Fraction) -> int:
    if q <= 1:
        return 0
    k, t = 0, 1
    while t < q:
        t *= 2
        k += 1
    return k


def approx_invert(auction: Auction, b, eps, _beta=None, _bounds=None) -> Fraction:
    """Value s with beta(s) in [b, b + 2*eps], by bisection on an exact beta
    oracle; stops when the bracketing beta-gap closes below eps, with a
    Lipschitz-derived iteration cap as a termination backstop."""
    b, eps = rat(b), rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    beta = _beta or (lambda x: eval_beta(auction, x))
    bounds = _bounds or bounds_profile(auction)
    vlo = bounds.v_lo
    beta_lo, beta_hi = beta(vlo), beta(ONE)
    if b < beta_lo or b > beta_hi:
        raise ValueError(f"bid {b} outside the bidding range [{beta_lo}, {beta_hi}]")
    if b == beta_lo:
        return vlo
    cap = _ceil_log2(bounds.lipschitz * (ONE - vlo) / eps) + 2
    lo, hi = vlo, ONE
    for _ in range(cap):
        if beta_hi - beta_lo <= eps:
            break
        mid = Fraction(lo + hi, 2)
        bm = beta(mid)
        if bm >= b:
            hi, beta_hi = mid, bm
        else:
            lo, beta_lo = mid, bm
    return hi


@dataclass(frozen=True)
class DensifyCertificate:
    strategy: JumpStrategy
    eps_inner: Fraction
    bounds: BoundsProfile
    claimed: Fraction  # 2 * gamma * (delta + 2 * eps_inner)
    measured: Fraction  # worst deviation gain from exact verification


DEFAULT_EPS = Fraction(1, 2**40)


def densify_solve(auction: Auction, eps=DEFAULT_EPS) -> DensifyCertificate:
    """Assemble the monotone step strategy that underapproximates the
    canonical equilibrium on the instance's bid grid and certify it.

    Thresholds are approximate inverses of the in-range bids; bids below the
    support's image never fire and bids above it are excluded.  The claimed
    bound is 2*gamma*(delta + 2*eps); the measured bound is the exact worst
    deviation gain of the symmetric profile, computed by the engine.
    """
    eps = rat(eps)
    bounds = bounds_profile(auction)
    beta = lambda x: eval_beta(auction, x)  # noqa: E731
    beta_one = beta(ONE)
    vlo = bounds.v_lo
    bids = auction.bids
    m = len(bids)

    in_range = [j for j in range(1, m) if vlo <= bids[j] <= beta_one]
    if in_range:
        m_lo, m_hi = in_range[0], in_range[-1]
        s = {}
        prev = vlo
        for j in in_range:
            sj = approx_invert(auction, bids[j], eps, _beta=beta, _bounds=bounds)
            prev = max(prev, sj)  # monotone backstop; a no-op for sane eps
            s[j] = prev
        thresholds = (
            [ZERO]
            + [bids[j] for j in range(1, m_lo)]
            + [s[j] for j in in_range]
            + [ONE] * (m - m_hi)
        )
    else:
        thresholds = [ZERO] + [ONE] * m
    strategy = JumpStrategy(bids, thresholds)

    claimed = 2 * bounds.gamma * (bounds.delta + 2 * eps)
    profile = Profile([strategy] * auction.n)
    measured = engine.verify_pbne(auction, profile, claimed).max_gain
    return DensifyCertificate(
        strategy=strategy,
        eps_inner=eps,
        bounds=bounds,
        claimed=claimed,
        measured=measured,
    )
