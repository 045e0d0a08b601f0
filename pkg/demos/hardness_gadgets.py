"""Demo: the SAT-to-auction reduction, gadget by gadget.

Builds the auction for a small formula, encodes a satisfying assignment as a
pure profile, verifies it is an exact equilibrium, shows that flipping an
output bidder breaks it, and prints one gadget's utility table to show where
the best-response wiring comes from.
"""

from fractions import Fraction as F

from fpaeq import Profile, best_response, utility, verify_pbne
from fpaeq.reduction import (
    B1,
    B2,
    B3,
    S0,
    _strategy,
    build_auction,
    encode_profile,
    extract_assignment,
    isolated_gadget,
    parse_sat,
)

ZERO = F(0)
ONE = F(1)

formula = parse_sat("""
c (x1 or x2) and (not x1 or x3)
p cnf 3 2
1 2 0
-1 3 0
""")
auction, rmap = build_auction(formula)
print(f"formula: {formula.clauses}")
print(f"auction: {rmap.n} bidders, {len(auction.prior.support)} support points")
print(f"normalization total: {rmap.chain.total}")
print(f"equilibrium threshold eps: {rmap.chain.eps_threshold}\n")

for i, role in enumerate(rmap.roles):
    tag = role.kind
    if role.variable is not None:
        tag += f"(x{role.variable + 1})"
    if role.clause is not None:
        tag += f"[c{role.clause}]"
    print(f"  bidder {i:2d}: {tag}")

assignment = {1: 1, 2: 0, 3: 1}
print(f"\nencoding satisfying assignment {assignment} ...")
profile = encode_profile(assignment, rmap)
report = verify_pbne(auction, profile, rmap.chain.eps_threshold / 2)
print(f"exact equilibrium? {report.ok} (worst gain {report.max_gain})")
print("extracted back:", extract_assignment(profile, rmap))

outk, _ = rmap.clause_out[0]
strategies = list(profile.strategies)
strategies[outk] = _strategy(outk, (ZERO, ZERO, B2))
flipped = Profile(strategies)
rep = best_response(auction, outk, ONE, flipped)
gain = rep.best_utility - utility(auction, outk, ONE, B2, flipped)
print(f"\nflipping output bidder {outk} to bid 2/7 at value 1:")
print(f"  its best response regains {gain} > eps threshold "
      f"({gain > rmap.chain.eps_threshold})")

print("\nisolated output gadget: scaled utilities of one output bidder at value 1")
auc, names, scale = isolated_gadget("out")
print("  partner bid | u(0)*n  u(b1)   u(b2)   u(b3)")
for l_bid, label in ((ZERO, "0"), (B1, "b1"), (B2, "b2"), (B3, "b3")):
    prof = Profile(
        [
            _strategy(names["or2"], S0),
            _strategy(names["k"], (ZERO, ZERO, ZERO)),
            _strategy(names["l"], (ZERO, ZERO, l_bid)),
        ]
    )
    row = [
        scale * utility(auc, names["k"], ONE, b, prof, raw=True)
        for b in (ZERO, B1, B2, B3)
    ]
    best = best_response(auc, names["k"], ONE, prof).argmax[0]
    print(f"  {label:>11} | " + "  ".join(f"{str(x):>7}" for x in row)
          + f"   best: {best}")
print("\nthe chase (0,b1 -> b2, b2 -> b3, b3 -> b1) has no fixed point:")
print("with the clause unsatisfied the output pair can never settle.")
