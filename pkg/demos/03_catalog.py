"""Verifying the classification catalog, symbolically and on sampled numbers.

Run with ``python3 demos/03_catalog.py``.
"""
from dlvsym import catalog

# %% Each row carries a template system, side conditions and its operators.
row = catalog.entry(2, 9)
print(catalog.export_listing([row]))

# %% Symbolic verification: Lie must fail, first type must hold for some pivot.
report = catalog.verify_entry(row)
for r in report.records:
    print(f"  {r.operator:<10} {r.kind:<10} {str(r.pivot):<5} {r.verdict}")
print("row ok:", report.ok)

# %% Instance mode draws admissible rational parameters from a seed.
for seed in range(3):
    params = catalog.sample_params(row, seed)
    print(f"seed {seed}:", ", ".join(f"{k}={v}" for k, v in sorted(params.items())[:4]), "...")
    print("    ok:", catalog.verify_entry(row, assign=params).ok)

# %% The whole Lie table, including the hierarchy checks.
total = sum(len(catalog.verify_entry(e, hierarchy=True).records) for e in catalog.entries(1))
print(f"\nLie table with hierarchy: {total} records verified")
