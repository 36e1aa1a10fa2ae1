import sys, time

sys.path.insert(0, "src")

from latentcover import graph as G
from latentcover import ecc as E

fig1 = G.from_edge_list(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
fig3 = G.from_edge_list(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)])
fig2_cliques = [(0, 1, 2, 4), (0, 3, 6), (1, 2, 4, 5, 7), (3, 5, 7), (1, 2, 6, 7)]
fig2_edges = sorted({(a, b) for c in fig2_cliques for i, a in enumerate(c) for b in c[i + 1:]})
fig2 = G.from_edge_list(8, fig2_edges)
print("fig2 edges:", len(fig2_edges))

print("maximal fig1:", [c.members for c in G.maximal_cliques(fig1)])
print("maximal fig3:", len(G.maximal_cliques(fig3)), [c.members for c in G.maximal_cliques(fig3)])

for name, g in [("fig1", fig1), ("fig3", fig3), ("fig2", fig2)]:
    t = time.time()
    cc = E.min_clique_ecc(g)
    ca = E.min_assignment_ecc(g)
    bc = E.brute_force_ecc(g, G.Objective.CLIQUE_COUNT)
    ba = E.brute_force_ecc(g, G.Objective.ASSIGNMENT_COUNT)
    print(
        name,
        "clique:", cc.objective_value, [c.members for c in cc.cliques],
        "| assign:", ca.objective_value, len(ca.cliques),
        "| brute:", bc.objective_value, ba.objective_value,
        "| covers equal:", cc.cliques == bc.cliques and ca.cliques == ba.cliques,
        f"({time.time()-t:.2f}s)",
    )

pair = G.generate_instance(G.InstanceKind.FRAGILE_FOOTNOTE, 6)
print("fragile n=6:", E.min_clique_ecc(pair.without_edge).objective_value,
      E.min_clique_ecc(pair.with_edge).objective_value)

# lex tie-break regression: non-maximal clique in the lex-least optimum
g5 = G.from_edge_list(5, [(0, 1), (0, 2), (1, 2), (0, 3), (2, 3), (1, 4), (2, 4)])
cc = E.min_clique_ecc(g5)
bc = E.brute_force_ecc(g5, G.Objective.CLIQUE_COUNT)
print("lex5:", [c.members for c in cc.cliques], "brute:", [c.members for c in bc.cliques])

# random battery vs brute force
import itertools
densities = [0.2, 0.4, 0.6, 0.8]
t = time.time()
bad = 0
for s in range(80):
    n = 3 + s % 6
    p = densities[s % 4]
    g = G.generate_instance(G.InstanceKind.ERDOS_RENYI, n, p, seed=s)
    for obj, solver in [(G.Objective.CLIQUE_COUNT, E.min_clique_ecc),
                        (G.Objective.ASSIGNMENT_COUNT, E.min_assignment_ecc)]:
        got = solver(g)
        ref = E.brute_force_ecc(g, obj)
        if got.objective_value != ref.objective_value or got.cliques != ref.cliques:
            bad += 1
            print("MISMATCH", s, n, p, obj, got.objective_value, ref.objective_value,
                  [c.members for c in got.cliques], [c.members for c in ref.cliques])
        if not E.verify_cover(g, got).ok:
            bad += 1
            print("verify FAIL", s, n, p, obj)
print(f"battery of 80 graphs: {bad} problems, {time.time()-t:.1f}s")

# the big one: n=40 p=0.3
g40 = G.generate_instance(G.InstanceKind.ERDOS_RENYI, 40, 0.3, seed=0)
print("n=40 edges:", g40.num_edges, "maximal cliques:", len(G.maximal_cliques(g40)))
t = time.time()
cov = E.min_clique_ecc(g40)
print(f"n=40 clique-min: {cov.objective_value} cliques in {time.time()-t:.1f}s, "
      f"verify={E.verify_cover(g40, cov).ok}")
