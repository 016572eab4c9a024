import time

from transferopt.milp import SolverParams, solve_milp
from transferopt.squadprob import build_squad_problem
from transferopt.synth import CLUB_SIZES, synthetic_instance, synthetic_value_model
from transferopt.values import sample_scenarios

model = synthetic_value_model(0)
total = 0.0
worst = 0.0
for club in CLUB_SIZES:
    line = f"{club:22s}"
    for alpha in (0.2, 0.8):
        inst = synthetic_instance(club, seed=0, alpha=alpha)
        scen = sample_scenarios(model, inst.players, 70, seed=1)
        prob = build_squad_problem(inst, scen)
        t0 = time.perf_counter()
        res = solve_milp(prob, SolverParams(time_limit=90))
        dt = time.perf_counter() - t0
        total += dt
        worst = max(worst, dt)
        obj = "None" if res.objective is None else f"{res.objective:.3f}"
        line += f" | a={alpha} {res.status.value[:12]:12s} obj={obj:>7s} n={res.nodes:5d} {dt:6.2f}s"
    print(line, flush=True)
print(f"\ntotal {total:.1f}s worst {worst:.2f}s")
