#!/usr/bin/env python3
"""Deviation gaps under four notions, cross-checked against brute force.

The gap of a correlated profile under a notion is the exact worst-case gain
of any deviation in that notion's class:

  nfcce      commit to a fixed plan before seeing anything
  efce       deviate knowing recommendations seen so far; once you disobey,
             the recommendations stop (ordinary regret)
  full-efce  keep seeing local recommendations after disobeying
             (ordinary regret)
  bce        same information as full-efce, but scored by counterfactual
             regret at every infoset separately

Run:  python demos/03_gaps_and_oracles.py
"""

import json

from gametree import gap
from gametree.fixtures import load_game, load_profile
from gametree.metrics import NOTIONS
from gametree.oracles import oracle_player_gap

print("=" * 72)
print("One-player game, profile = (0.9 L + 0.1 R, R')")
print("=" * 72)
lrr = load_game("lrr")
pi = load_profile(lrr, "lrr")
for notion in NOTIONS:
    report = gap(lrr, pi, notion)
    oracle, _w, _p = oracle_player_gap(lrr, pi, notion, 0)
    print(f"  {notion:9s} gap = {str(report.overall):4s}   "
          f"brute-force oracle = {str(oracle):4s}")
print()
print("The efce witness (obey until the trigger, then commit):")
print(json.dumps(gap(lrr, pi, "efce").witness.to_json_dict(lrr), indent=2))
print()
print("Playing L' at the lower infoset gains a full point counterfactually")
print("(the recommendation there is always R'), so the bce gap is 1 even")
print("though the causal gap is only 1/5: a deviator who keeps receiving")
print("recommendations after disobeying is strictly stronger.")

print()
print("=" * 72)
print("Two-player upgrade game: an exact causal equilibrium that is not a")
print("counterfactual one")
print("=" * 72)
ebos = load_game("ebos")
pi = load_profile(ebos, "ebos")
for notion in NOTIONS:
    print(f"  {notion:9s} gap = {gap(ebos, pi, notion).overall}")
print()
print("P1's profitable trick needs future recommendations: upgrade against")
print("the recommendation, then follow the event recommendation, earning")
print("(3+2)/2 = 5/2 instead of 3/2. Causal deviators lose the event signal")
print("the moment they disobey, so the efce gap stays 0.")
report = gap(ebos, pi, "bce")
print("bce per-infoset gaps:",
      {f"{ebos.players[i]}:{iset}": str(v)
       for (i, iset), v in report.per_infoset.items()})
