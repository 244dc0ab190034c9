"""The four trace coordinates of order-three pairs and the double cover over them.

Run with ``python3 demos/03_trace_coordinates.py``.
"""

from sl3whitehead.whitehead import load_instance
from sl3whitehead.x0 import (
    build_pair,
    commutator_discriminant_check,
    discriminant,
    solve_parameters,
    trace_map,
)

inst = load_instance()
traces = trace_map(inst.S, inst.T)
z = (traces[2], traces[3], traces[6], traces[7])
print("traces of (S, T):", [str(t) for t in traces])
print("Delta =", discriminant(z))

for sign in (1, -1):
    p = solve_parameters(z, sign)
    A, B = build_pair(p)
    same = list(trace_map(A, B)) == list(traces)
    print(f"sign {sign:+d}: delta = {p.delta}, pair reproduces all nine traces: {same}")

# Over Delta = 0 the two sheets meet.
for sample in ((5, 3, 5, 3), (1, 2, 3, 4), (-5, -4, 1, 5)):
    r = commutator_discriminant_check(sample)
    print(f"z = {sample}: Delta = {r.discriminant}, t+ = {r.t_plus}, t- = {r.t_minus}, "
          f"(t+ - t-)^2 = Delta: {r.square_matches}")
