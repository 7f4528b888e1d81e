"""A whole line of coexistence equilibria, attractive or unstable.

With unit healing rates, pick any B1 above threshold and let z be its
endemic equilibrium. Any nonnegative irreducible C with Cz = z induces
B2 = (I-Z)^-1 C, and then every point (b*z, (1-b)*z, 0) with b in [0, 1]
is an equilibrium: viruses 0 and 1 share the infected population in an
arbitrary ratio while virus 2 is extinct. The third layer decides the
fate of the whole segment: s(-I + (I-Z)B3) < 0 makes it locally
exponentially attractive, > 0 makes it unstable.

Run:  python3 demos/line_of_equilibria_demo.py
"""

import numpy as np

import trivirus as tv
from trivirus import equilibria
from trivirus.scenarios import builtin_example

for example_id in (4, 3):
    scn = builtin_example(example_id)
    system, con = tv.construct_line_system(scn.system.B[0], scn.system.B[2], scn.line_C)
    verdict = tv.line_stability(system, con)
    print(f"preset {example_id}: z = {np.round(con.z, 6)}")
    print(
        f"  rho((I-Z)B3) = {verdict.rho_value:.4f}  ->  line verdict: {verdict.verdict}"
    )

    # every member of the segment really is an equilibrium
    worst = max(
        float(np.max(np.abs(tv.vector_field(system, tv.line_point(con.z, b)))))
        for b in np.linspace(0, 1, 21)
    )
    print(f"  worst vector-field residual along 21 line members: {worst:.2e}")

# In the attractive regime the landing position on the line depends on the
# initial condition: different seeds end at different splits b.
scn = builtin_example(4)
system, con = tv.construct_line_system(scn.system.B[0], scn.system.B[2], scn.line_C)
desc = equilibria.line_descriptor(system, con.z)
print("\nattractive regime: landing position vs seed")
for seed in range(5):
    x0 = tv.random_initial_condition(system.n, system.m, seed)
    traj = tv.integrate(system, x0, t_end=1e4)
    rep = tv.detect_convergence(traj, desc, tol=1e-8)
    print(
        f"  seed {seed}: distance to line {rep.final_distance:.2e}, "
        f"split b = {rep.line_parameter:.4f}"
    )
