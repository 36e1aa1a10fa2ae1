import sys, time

sys.path.insert(0, "src")

from latentcover import graph as G
from latentcover import ecc as E

for seed in (1, 2, 3):
    g = G.generate_instance(G.InstanceKind.ERDOS_RENYI, 40, 0.3, seed=seed)
    t = time.time()
    try:
        cov = E.min_clique_ecc(g, E.SolverBudget(max_seconds=90))
        print(f"n=40 seed={seed}: m={g.num_edges} k={cov.objective_value} {time.time()-t:.1f}s", flush=True)
    except E.BudgetExceededError as exc:
        print(f"n=40 seed={seed}: BUDGET {exc}", flush=True)

g61 = G.generate_instance(G.InstanceKind.ERDOS_RENYI, 61, 0.3, seed=0)
print("n=61 edges:", g61.num_edges, "maxcliques:", len(G.maximal_cliques(g61)), flush=True)
t = time.time()
try:
    cov = E.min_clique_ecc(g61, E.SolverBudget(max_seconds=120))
    print(f"n=61: k={cov.objective_value} in {time.time()-t:.1f}s verify={E.verify_cover(g61, cov).ok}", flush=True)
except E.BudgetExceededError as exc:
    print(f"n=61 budget exceeded ({time.time()-t:.1f}s): {exc}", flush=True)

for seed in (0, 1):
    g = G.generate_instance(G.InstanceKind.ERDOS_RENYI, 18, 0.3, seed=seed)
    t = time.time()
    try:
        cov = E.min_assignment_ecc(g, E.SolverBudget(max_seconds=60))
        print(f"assign n=18 seed={seed}: m={g.num_edges} A={cov.objective_value} "
              f"cliques={len(cov.cliques)} {time.time()-t:.1f}s", flush=True)
    except E.BudgetExceededError as exc:
        print(f"assign n=18 seed={seed}: BUDGET {exc}", flush=True)
