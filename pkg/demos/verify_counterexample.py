"""Demo: exact utilities, best responses, and why monotone equilibria can fail.

Two bidders with anti-correlated values, uniform over
{(0,1), (1/2,1/2), (1,0)}, bidding in tenths.  A bidder seeing value 1 knows
the opponent is worthless and bids the cheapest winning bid; a bidder seeing
1/2 knows the opponent also has 1/2 and must outbid her.  The result is an
exact pure equilibrium that bids MORE at the middle value than at the top
value, while every monotone profile fails.
"""

from fractions import Fraction as F

from fpaeq import (
    Auction,
    BidSpace,
    DiscretePrior,
    Profile,
    PureStrategy,
    best_response,
    check_affiliation,
    check_monotone,
    conditional,
    marginal,
    verify_pbne,
)
from fpaeq.search import SearchConfig, enumerate_pure_equilibria

prior = DiscretePrior(
    2,
    [(0, F(1, 2), 1)] * 2,
    [((0, F(1)), F(1, 3)), ((F(1, 2), F(1, 2)), F(1, 3)), ((F(1), F(0)), F(1, 3))],
)
auction = Auction(BidSpace([F(k, 10) for k in range(11)]), prior)

print("marginal of bidder 0:", {str(v): str(m) for v, m in marginal(prior, 0).items()})
print("beliefs at value 1:  ", {str(t[0]): str(m) for t, m in conditional(prior, 0, 1).items()})
print("beliefs at value 1/2:", {str(t[0]): str(m) for t, m in conditional(prior, 0, F(1, 2)).items()})

ok, witness = check_affiliation(prior)
print(f"\naffiliated? {ok}; violating value pair: {witness}")

candidate = {F(0): F(0), F(1, 2): F(3, 10), F(1): F(1, 10)}
profile = Profile([PureStrategy(i, candidate) for i in range(2)])
print("\ncandidate strategy (both bidders):", {str(v): str(b) for v, b in candidate.items()})
print("monotone?", check_monotone(profile.strategies[0]))

for v in (F(1, 2), F(1)):
    rep = best_response(auction, 0, v, profile)
    print(f"best response at value {v}: bids {[str(b) for b in rep.argmax]}, "
          f"utility {rep.best_utility}")

report = verify_pbne(auction, profile, 0)
print(f"\nexact equilibrium? {report.ok} (worst deviation gain {report.max_gain})")

print("\nsearching all monotone non-overbidding pure profiles at eps = 1/100 ...")
result = enumerate_pure_equilibria(
    auction, SearchConfig(eps=F(1, 100), monotone_only=True)
)
print(f"result: {result.status} after {result.checked} profiles")

print("\nsearching without the monotonicity filter at eps = 0 ...")
result = enumerate_pure_equilibria(auction, SearchConfig(eps=0))
found = result.profile.strategies[0]
print(f"found after {result.checked} profiles:",
      {str(v): str(b) for v, b in found.mapping})
print("monotone?", check_monotone(found))
