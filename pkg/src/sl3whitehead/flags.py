"""Flags in P^2, triple ratios, edge cross-ratios and tetrahedron coordinates.

A flag is a point ``x`` (column vector) together with a line through it,
stored as a covector ``f`` with ``f(x) = 0``.  Both are projective: scaling
either one gives the same flag.

Edge coordinates of a tetrahedron of flags use 1-based vertex labels so that
``z[(1, 2)]`` is the coordinate attached to the half-edge from vertex 1
towards vertex 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .exactfield import FieldElement
from .linalg import (
    Matrix,
    common_tower,
    is_regular_unipotent,
    kernel_basis,
    parallel,
)

__all__ = [
    "Flag",
    "FlagTetrahedron",
    "ZCoordinates",
    "GeneralPositionError",
    "NotRegularError",
    "IncidenceError",
    "CROSS_RATIO_LINES",
    "pair",
    "det3",
    "triple_ratio",
    "cross_ratio_edge",
    "tetra_coordinates",
    "complete_coordinates",
    "is_general_position",
    "invariant_flag",
    "even_completion",
    "HALF_EDGES",
]


class IncidenceError(ValueError):
    pass


class GeneralPositionError(ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"flags not in general position: {witness}")


class NotRegularError(ValueError):
    pass


HALF_EDGES = ((1, 2), (1, 3), (1, 4), (2, 1), (2, 3), (2, 4),
              (3, 1), (3, 2), (3, 4), (4, 1), (4, 2), (4, 3))

# Lines through x_i in the order fed to the cross-ratio: the line of the flag
# at x_i first, then the lines towards x_j, x_k, x_l.
CROSS_RATIO_LINES = ("flag", "j", "k", "l")


def pair(f, x):
    """Evaluate the covector ``f`` on the vector ``x``."""
    total = f[0] * x[0]
    for a, b in zip(f[1:], x[1:]):
        total = total + a * b
    return total


def det3(u, v, w):
    return (u[0] * (v[1] * w[2] - v[2] * w[1])
            - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]))


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _is_zero_vector(v):
    return all(x.is_zero() for x in v)


def even_completion(i, j):
    """The ``(k, l)`` making ``(i, j, k, l)`` an even permutation of 1..4."""
    k, l = (m for m in (1, 2, 3, 4) if m not in (i, j))
    if _parity((i, j, k, l)) != 0:
        k, l = l, k
    return k, l


def _parity(p):
    p = list(p)
    swaps = 0
    for a in range(len(p)):
        while p[a] != a + 1:
            b = p[a] - 1
            p[a], p[b] = p[b], p[a]
            swaps += 1
    return swaps % 2


@dataclass(frozen=True)
class Flag:
    point: tuple
    form: tuple

    def __post_init__(self):
        tower = common_tower(list(self.point) + list(self.form))
        point = tuple(tower.coerce(x) for x in self.point)
        form = tuple(tower.coerce(x) for x in self.form)
        if len(point) != 3 or len(form) != 3:
            raise ValueError("flags in P^2 need 3 coordinates")
        if _is_zero_vector(point) or _is_zero_vector(form):
            raise ValueError("flag point and form must be nonzero")
        if not pair(form, point).is_zero():
            raise IncidenceError(f"f(x) = {pair(form, point)} != 0")
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "form", form)

    @property
    def tower(self):
        return self.point[0].tower

    def transform(self, g):
        """Image under ``g``: ``(g x, f g^-1)``."""
        return Flag(g.apply(self.point), g.inverse().left_apply(self.form))

    def is_fixed_by(self, g):
        return self.projectively_equal(self.transform(g))

    def projectively_equal(self, other):
        return parallel(self.point, other.point) and parallel(self.form, other.form)

    def line_vector(self):
        """A vector ``u`` in ``ker f`` not proportional to ``x``."""
        one, zero = self.tower.one(), self.tower.zero()
        for e in range(3):
            basis = tuple(one if c == e else zero for c in range(3))
            u = _cross(self.form, basis)
            if not _is_zero_vector(u) and not _is_zero_vector(_cross(u, self.point)):
                return u
        raise AssertionError("flag line has no second point")  # impossible for a valid flag

    def to_json(self):
        return {"point": [x.to_json() for x in self.point], "form": [x.to_json() for x in self.form]}

    @classmethod
    def from_json(cls, data, tower=None):
        return cls(
            tuple(FieldElement.from_json(x) for x in data["point"]),
            tuple(FieldElement.from_json(x) for x in data["form"]),
        )


def triple_ratio(fi, fj, fk):
    """``fi(xj) fj(xk) fk(xi) / (fi(xk) fj(xi) fk(xj))``."""
    num = pair(fi.form, fj.point) * pair(fj.form, fk.point) * pair(fk.form, fi.point)
    den = pair(fi.form, fk.point) * pair(fj.form, fi.point) * pair(fk.form, fj.point)
    return num / den


def is_general_position(flags):
    """Check that points are in general position and each point is off the other lines.

    Returns ``(ok, witness)`` where ``witness`` names the first failure.
    """
    n = len(flags)
    for i in range(n):
        for j in range(n):
            if i != j and pair(flags[i].form, flags[j].point).is_zero():
                return False, f"point {j + 1} lies on the line of flag {i + 1}"
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                if det3(flags[a].point, flags[b].point, flags[c].point).is_zero():
                    return False, f"points {a + 1}, {b + 1}, {c + 1} are collinear"
    return True, None


class FlagTetrahedron:
    """Four flags in general position, labelled 1..4."""

    def __init__(self, flags):
        flags = tuple(flags)
        if len(flags) != 4:
            raise ValueError("a tetrahedron needs four flags")
        ok, witness = is_general_position(flags)
        if not ok:
            raise GeneralPositionError(witness)
        self.flags = flags

    def __getitem__(self, i):
        return self.flags[i - 1]


def cross_ratio_edge(tet, i, j):
    """Coordinate of the half-edge ``i -> j`` (1-based vertex labels).

    Cross-ratio of the four lines through ``x_i`` ordered as
    :data:`CROSS_RATIO_LINES`, with ``(i, j, k, l)`` even.
    """
    k, l = even_completion(i, j)
    fi = tet[i]
    x = fi.point
    v1, v2, v3, v4 = fi.line_vector(), tet[j].point, tet[k].point, tet[l].point
    num = det3(x, v1, v3) * det3(x, v2, v4)
    den = det3(x, v1, v4) * det3(x, v2, v3)
    return num / den


@dataclass
class ZCoordinates:
    """Edge and face coordinates of one tetrahedron."""

    edges: dict
    faces: dict = field(default_factory=dict)

    def __getitem__(self, key):
        if len(key) == 2:
            return self.edges[tuple(key)]
        return self.faces[tuple(key)]

    def main_four(self):
        """``(z12, z21, z34, z43)``, which determine the rest."""
        return tuple(self.edges[e] for e in ((1, 2), (2, 1), (3, 4), (4, 3)))

    def relation_failures(self):
        """List the internal relations that do not hold (empty when consistent)."""
        z = self.edges
        bad = []
        for i in (1, 2, 3, 4):
            for j in (1, 2, 3, 4):
                if i == j:
                    continue
                k, l = even_completion(i, j)
                if not (z[(i, k)] * (1 - z[(i, j)]) == 1):
                    bad.append(f"z{i}{k} (1 - z{i}{j}) != 1")
                if not (z[(i, j)] * z[(i, k)] * z[(i, l)] == -1):
                    bad.append(f"z{i}{j} z{i}{k} z{i}{l} != -1")
        for (i, j, k), t in self.faces.items():
            l = next(m for m in (1, 2, 3, 4) if m not in (i, j, k))
            if not (t == -(z[(i, l)] * z[(j, l)] * z[(k, l)])):
                bad.append(f"z{i}{j}{k} != -z{i}{l} z{j}{l} z{k}{l}")
            if (i, k, j) in self.faces and not (t * self.faces[(i, k, j)] == 1):
                bad.append(f"z{i}{j}{k} z{i}{k}{j} != 1")
        return sorted(set(bad))


def _face_triple(l):
    """Orientation of the face opposite ``l``, induced from the tetrahedron."""
    for p in permutations([m for m in (1, 2, 3, 4) if m != l]):
        if _parity(p + (l,)) == 0:
            return p
    raise AssertionError


def tetra_coordinates(tet, check=True):
    """All twelve edge coordinates and four face coordinates of ``tet``."""
    edges = {(i, j): cross_ratio_edge(tet, i, j) for i, j in HALF_EDGES}
    faces = {}
    for l in (1, 2, 3, 4):
        i, j, k = _face_triple(l)
        faces[(i, j, k)] = triple_ratio(tet[i], tet[j], tet[k])
    z = ZCoordinates(edges, faces)
    if check:
        bad = z.relation_failures()
        if bad:
            raise AssertionError(f"internal relations fail: {bad}")
    return z


def complete_coordinates(z12, z21, z34, z43):
    """All twelve edge coordinates from the main four, using the internal relations."""
    edges = {}
    for (i, j), zij in zip(((1, 2), (2, 1), (3, 4), (4, 3)), (z12, z21, z34, z43)):
        k, l = even_completion(i, j)
        zik = 1 / (1 - zij)
        edges[(i, j)], edges[(i, k)], edges[(i, l)] = zij, zik, -1 / (zij * zik)
    return ZCoordinates(edges)


def invariant_flag(m, eigenvalues=None):
    """The flag preserved by ``m``.

    With ``eigenvalues=None`` the matrix must be regular unipotent and the
    flag is ``(ker(m - 1), im(m - 1))``.  For a regular semisimple matrix pass
    ``(lambda_point, lambda_plane)``: the point is the ``lambda_point``
    eigenline and the line is spanned by it and the ``lambda_plane`` eigenline.
    """
    if m.shape != (3, 3):
        raise ValueError("invariant_flag works in SL(3)")
    one = Matrix.identity(3, m.tower)
    if eigenvalues is None:
        if not is_regular_unipotent(m):
            raise NotRegularError("matrix is not regular unipotent")
        n = m - one
        point = _line(kernel_basis(n), "fixed points")
        form = _line(kernel_basis(n.transpose()), "fixed lines")
        return Flag(point, form)
    lam_point, lam_plane = eigenvalues
    point = _line(kernel_basis(m - one * lam_point), f"eigenvalue {lam_point}")
    other = _line(kernel_basis(m - one * lam_plane), f"eigenvalue {lam_plane}")
    if parallel(point, other):
        raise NotRegularError("the two eigenlines coincide")
    form = _line(kernel_basis(Matrix([point, other])), "plane")
    return Flag(point, form)


def _line(basis, what):
    if len(basis) != 1:
        raise NotRegularError(f"{what}: expected a single line, found dimension {len(basis)}")
    return basis[0]
