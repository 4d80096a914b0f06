"""
Fitting the beta-model to an undirected graph
=============================================

The beta-model gives every node a sociability parameter and joins i and j
with probability sigmoid(beta_i + beta_j). Its sufficient statistic is the
degree sequence, so fitting reduces to matching observed and expected
degrees.
"""

import numpy as np

from wilks import fit_mle, read_edge_list, simulate_beta_graph, write_edge_list
from wilks.errors import MleNonexistent

# A 4-cycle: every node has degree 2 out of a possible 3, so by symmetry all
# parameters agree and solve 3 * sigmoid(2 beta) = 2, i.e. beta = log(2) / 2.
cycle = read_edge_list("1 2\n1 3\n2 4\n3 4\n")
fit = fit_mle(cycle)
print("4-cycle estimates:", np.round(fit.beta, 6), " log(2)/2 =", round(np.log(2) / 2, 6))

# Simulate a larger graph from a known parameter vector and recover it.
rng = np.random.default_rng(2024)
truth = rng.uniform(0, 1, 300)
graph = simulate_beta_graph(truth, rng)
fit = fit_mle(graph)
print(f"\nn = {graph.n}, edges = {graph.n_edges}, iterations = {fit.iterations} ({fit.method})")
print(f"largest |beta_hat - beta| = {np.max(np.abs(fit.beta - truth)):.3f}")
print(f"b_n = {fit.b_n:.3f}, c_n = {fit.c_n:.3f} (plug-in)")

# Standard errors come from the diagonal of the information matrix.
for i in range(3):
    print(f"  node {i + 1}: beta_hat = {fit.beta[i]:+.3f} +/- {fit.se[i]:.3f} (truth {truth[i]:+.3f})")

# The MLE fails to exist when the degree sequence sits on the boundary of its
# convex support. Degrees 0 or n-1 are the obvious cases. A star attached to
# a triangle is a subtler one: no degree is extreme, yet no maximiser exists.
try:
    fit_mle(read_edge_list("1 2\n1 3\n1 4\n2 3\n"))
except MleNonexistent as exc:
    print("\nboundary degree sequence:", exc)

# The canonical writer declares the node count, so isolated nodes survive a
# round trip through text.
print("\n" + write_edge_list(read_edge_list("#n 5\n1 2\n2 3\n")))
