"""Generating and comparing determining equations.

Run with ``python3 demos/02_determining_equations.py``.
"""
from dlvsym import DLVSystem, RDSystem, determining_equations, first_type_determining_equations
from dlvsym.parser import parse

# %% The heat system: three decoupled heat equations with unit diffusivity.
heat = determining_equations(RDSystem((1, 1, 1), (0, 0, 0)))
print(f"{len(heat.equations)} equations for the heat system, first few:")
for line in heat.lines()[:8]:
    print("   ", line)

# %% The generic system. Membership is tested after normalization,
# so a constant factor on either side does not matter.
des = determining_equations(DLVSystem.symbolic())
print(f"\n{len(des.equations)} equations for the generic system")
for text in ("xi0_x", "xi0_t - 2*xi1_x", "2*eta1_xu + lambda1*xi1_t", "-5*eta1_uu"):
    print(f"    contains {text!r}: {des.contains(parse(text))}")

# %% With distinct diffusivities the first-type system is not the Lie system.
generic_u = first_type_determining_equations(DLVSystem.symbolic(), pivot="u")
cross = [str(e) for e in generic_u.equations if "eta2_u" in str(e) and "lambda2" in str(e)]
print(f"\nfirst-type (pivot u) system has {len(generic_u.equations)} equations;"
      f" {len(cross)} carry the lambda1 - lambda2 coupling")

# %% With equal diffusivities the two systems coincide.
equal = DLVSystem.symbolic(lambda1="lambda", lambda2="lambda", lambda3="lambda")
for pivot in "uvw":
    same = first_type_determining_equations(equal, pivot=pivot).equations == \
        determining_equations(equal).equations
    print(f"equal diffusivities, pivot {pivot}: identical to Lie = {same}")
