import time

import numpy as np

from transferopt.ratings import fit_ratings, player_rating
from transferopt.synth import synthetic_match_corpus

t0 = time.perf_counter()
segs, players, truth = synthetic_match_corpus(seed=0, n_matches=2200, n_players=80)
t1 = time.perf_counter()
print(f"generated {len(segs)} segments in {t1-t0:.1f}s")

model = fit_ratings(segs, players, mode="novel")
t2 = time.perf_counter()
print(f"fitted in {t2-t1:.1f}s; CG iters={model.report.iterations} "
      f"rel={model.report.relative_residual:.2e} converged={model.report.converged}")

counts = {}
for s in segs:
    for p in s.home_players + s.away_players:
        counts[p] = counts.get(p, 0) + 1
qualified = [p for p in model.player_ids if counts.get(p, 0) >= 30]
true_b = np.array([truth.beta_player[p] for p in qualified])
est_b = np.array([model.beta_player[model.player_ids.index(p)] for p in qualified])
r = np.corrcoef(true_b, est_b)[0, 1]
print(f"players with >=30 segments: {len(qualified)}  Pearson r = {r:.4f}")

ha = model.average_home_advantage()
print(f"home advantage: true 0.25, recovered {ha:.4f}")

curve = model.age_curve()
peak = max(curve, key=curve.get)
print(f"age peak: true 26, recovered {peak}")
print(f"red home1: true -0.83, recovered {model.beta_home_red[0]:.3f}")
print(f"red away1: true -1.07, recovered {model.beta_away_red[0]:.3f}")
print(f"total {time.perf_counter()-t0:.1f}s")
