"""Print the splitting exponents of the three-node chain and spot-check the
operator factorization and a numeric symbol value.

Usage: python3 scripts/chain_tree_symbols.py
"""

import math

from flagpde import Tree, check_splitting, compute_splitting, evaluate_symbol, tricomi_operator

chain = Tree(3, [(1, 2), (2, 3)])
splitting = compute_splitting(chain)

print("tree:", chain.to_json())
print("operator:", tricomi_operator(chain))
for i, xi in enumerate(splitting.exponents, start=1):
    print(f"exponent {i}: {xi}")

report = check_splitting(chain, degree_cap=3, t_power_cap=3)
print(f"splitting identity verified on {report.monomials_checked} monomials")

mode, widths, t, point = (1, 1, 1), (1.0, 1.0, 1.0), 0.1, (0.2, 0.3, 0.4)
value = evaluate_symbol(splitting, mode, widths, t, point)
print(f"symbol value at mode {mode}, t={t}, x={point}: {value}")
print(f"|exp(symbol)| = {abs(math.e ** value.real):.6f}")
