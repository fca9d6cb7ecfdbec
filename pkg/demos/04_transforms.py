"""Local equivalence transforms acting on systems and operators.

Run with ``python3 demos/04_transforms.py``.
"""
from dlvsym import DLVSystem, LocalTransform, catalog
from dlvsym.checker import check_first_type

# %% Scaling u -> -b*u, v -> -c*v, w -> -d*w turns the case-4 template into the
# competition system with a shared interaction row.
template = catalog.entry(2, 4).template()
t = LocalTransform.scaling("-b", "-c", "-d")
print("template:\n" + "\n".join(template.describe()))
competition = t.apply_to_system(template)
print("after the scaling:\n" + "\n".join(competition.describe()))
print("inverse maps back:", t.inverse().apply_to_system(competition) == template)

# %% Operators follow along, and their verdicts do not change.
system, ops = catalog.instantiate(catalog.entry(2, 4))
label, q = ops[0]
q2 = t.apply_to_field(q)
print(f"\n{label}: {q}\n  becomes {q2}")
print("  verdicts before:", {p: v.passed for p, v in check_first_type(system, q).items()})
print("  verdicts after: ", {p: v.passed for p, v in check_first_type(t.apply_to_system(system), q2).items()})

# %% Mixing components is only allowed when the diffusivities agree.
try:
    LocalTransform.make(c12=1).apply_to_system(DLVSystem.symbolic())
except Exception as err:  # LeavesClassError
    print("\nmixing u and v:", err)
