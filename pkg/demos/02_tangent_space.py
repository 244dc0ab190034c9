"""Residuals and the Zariski tangent space at the bundled point.

Run with ``python3 demos/02_tangent_space.py``.
"""

import time

from sl3whitehead.defvar import build_jacobian, evaluate_residuals
from sl3whitehead.linalg import kernel_basis, rank
from sl3whitehead.whitehead import load_instance

inst = load_instance()
system, point = inst.gluing, inst.point

res = evaluate_residuals(system, point)
print(f"{len(res)} residuals, all equal to 1: {all(r == 1 for r in res)}")

for entry in ("z_il", "log"):
    start = time.perf_counter()
    jac = build_jacobian(system, point, affine_entry=entry)
    basis = kernel_basis(jac)
    r = rank(jac)
    print(f"affine entries {entry!r}: rank {r}, kernel dimension {len(basis)}, "
          f"{time.perf_counter() - start:.2f}s")

print("first kernel vector:")
for c, x in enumerate(basis[0]):
    if not x.is_zero():
        print(f"    column {c:2d}: {x}")
