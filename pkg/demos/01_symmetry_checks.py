"""Checking point operators against a three-species diffusive Lotka-Volterra system.

Run with ``python3 demos/01_symmetry_checks.py``.
"""
from dlvsym import (LIE, NONCLASSICAL, DLVSystem, VectorField, check_first_type,
                    check_invariance)

# %% A generic system: every coefficient is a free parameter.
system = DLVSystem.symbolic()
print("\n".join(system.describe()))

# %% Translations in t and x are symmetries of every system in the class.
for q in (VectorField.make(xi0=1), VectorField.make(xi1=1)):
    print(q, "->", check_invariance(system, q, LIE))

# %% The dilation needs the linear growth rates to vanish.
dilation = VectorField.make(xi0="2*t", xi1="x", eta1="-2*u", eta2="-2*v", eta3="-2*w")
print("dilation, generic system:", check_invariance(system, dilation, LIE))
print("dilation, a1 = a2 = a3 = 0:",
      check_invariance(DLVSystem.symbolic(a1=0, a2=0, a3=0), dilation, LIE))

# %% A conditional operator: the invariant surface condition for u is imposed
# alongside the equations, so a weaker criterion can hold where Lie fails.
competition = DLVSystem.from_rows(
    ("lambda1", "lambda2", "lambda3"),
    [("a1", "-b", "-c", "-d"), ("a2", "-b", "-c", "-d"),
     ("((lambda1 - lambda3)*a2 - (lambda2 - lambda3)*a1)/(lambda1 - lambda2)", "-b", "-c", "-d")])
q = VectorField.make(
    xi0=1,
    eta1="(a1 - a2)/(lambda1 - lambda2)*u",
    eta2="-(a1 - a2)/(lambda1 - lambda2)*b/c*u",
)
print(check_invariance(competition, q, LIE))
for pivot, verdict in check_first_type(competition, q).items():
    print(verdict)
print(check_invariance(competition, q, NONCLASSICAL))
