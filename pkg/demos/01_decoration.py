"""From the order-three pair (S, T) to a point of the deformation variety.

Run with ``python3 demos/01_decoration.py``.
"""

from sl3whitehead.flags import FlagTetrahedron, tetra_coordinates
from sl3whitehead.linalg import is_regular_unipotent
from sl3whitehead.whitehead import build_decoration, load_instance
from sl3whitehead.words import evaluate

inst = load_instance()
S, T = inst.S, inst.T
print("S =", S)
print("T =", T)

# Each cusp vertex is stabilised by a regular unipotent element, whose
# unique invariant flag decorates that vertex.
images = {"s": S, "t": T}
flags = build_decoration(inst)
for tag, word in inst.stabilizers.items():
    m = evaluate(word, images)
    same = flags[tag].projectively_equal(inst.flags[tag])
    print(f"{tag:>9}: stabilizer {word.compact():<10} unipotent={is_regular_unipotent(m)} matches table={same}")

# Four flag tetrahedra give 48 edge coordinates.
for n, tags in enumerate(inst.tetrahedra):
    z = tetra_coordinates(FlagTetrahedron([flags[t] for t in tags]))
    print(f"tetrahedron {n} {tags}")
    for name, value in zip(("z12", "z21", "z34", "z43"), z.main_four()):
        print(f"    {name} = {value}")
