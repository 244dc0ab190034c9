"""Deformation-variety instances: gluing systems, residuals and the log Jacobian.

Variables are the twelve edge coordinates of each tetrahedron.  Column
``12 * t + r`` holds the half-edge ``HALF_EDGES[r]`` of tetrahedron ``t``.
Every relation is monomial or affine, so in the basis ``z d/dz`` the
differential of a monomial is its integer exponent vector.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .exactfield import FieldElement, FieldTower
from .flags import HALF_EDGES, even_completion
from .linalg import Matrix, common_tower, kernel_basis

__all__ = [
    "HALF_EDGES",
    "VariableIndex",
    "GluingRow",
    "GluingSystem",
    "DefPoint",
    "RelationDescriptor",
    "DegenerateCoordinateError",
    "OffVarietyError",
    "InstanceFormatError",
    "column",
    "half_edge_tag",
    "parse_half_edge_tag",
    "internal_relation_rows",
    "evaluate_residuals",
    "residual_labels",
    "build_jacobian",
    "tangent_dimension",
    "tangent_basis",
    "derive_gluing_system",
    "import_matrix_csv",
]


class DegenerateCoordinateError(ValueError):
    pass


class OffVarietyError(ValueError):
    def __init__(self, index, label, value):
        self.index, self.label, self.value = index, label, value
        super().__init__(f"point is off the variety: residual {index} ({label}) = {value}")


class InstanceFormatError(ValueError):
    pass


def column(tet, i, j):
    return 12 * tet + HALF_EDGES.index((i, j))


def half_edge_tag(tet, i, j):
    """Tag such as ``"t0:12"`` for the half-edge ``1 -> 2`` of tetrahedron 0."""
    return f"t{tet}:{i}{j}"


def parse_half_edge_tag(tag):
    try:
        head, edge = tag.split(":")
        tet, i, j = int(head.lstrip("t")), int(edge[0]), int(edge[1])
    except (ValueError, IndexError) as exc:
        raise InstanceFormatError(f"bad half-edge tag {tag!r}") from exc
    if len(edge) != 2 or (i, j) not in HALF_EDGES or tet < 0:
        raise InstanceFormatError(f"bad half-edge tag {tag!r}")
    return tet, i, j


@dataclass(frozen=True)
class VariableIndex:
    tetrahedron: int
    i: int
    j: int

    @property
    def column(self):
        return column(self.tetrahedron, self.i, self.j)

    @classmethod
    def from_column(cls, c):
        tet, r = divmod(c, 12)
        return cls(tet, *HALF_EDGES[r])

    @property
    def tag(self):
        return half_edge_tag(self.tetrahedron, self.i, self.j)


def canonical_order(nu):
    return [VariableIndex.from_column(c).tag for c in range(12 * nu)]


@dataclass(frozen=True)
class GluingRow:
    type: str
    exponents: tuple
    label: str = ""

    def __post_init__(self):
        if self.type not in ("face", "edge"):
            raise InstanceFormatError(f"row type must be face or edge, got {self.type!r}")
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))


@dataclass(frozen=True)
class GluingSystem:
    nu: int
    rows: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.nu < 1:
            raise InstanceFormatError("need at least one tetrahedron")
        rows = tuple(self.rows)
        for r in rows:
            if len(r.exponents) != 12 * self.nu:
                raise InstanceFormatError(
                    f"row {r.label!r} has {len(r.exponents)} exponents, expected {12 * self.nu}"
                )
        object.__setattr__(self, "rows", rows)

    @property
    def ncols(self):
        return 12 * self.nu

    def with_rows(self, rows):
        return GluingSystem(self.nu, tuple(rows))

    def to_json(self):
        return {
            "nu": self.nu,
            "column_order": canonical_order(self.nu),
            "rows": [{"type": r.type, "exponents": list(r.exponents), "label": r.label} for r in self.rows],
        }

    @classmethod
    def from_json(cls, data):
        try:
            nu = int(data["nu"])
            rows = data["rows"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceFormatError(f"instance JSON missing field: {exc}") from exc
        order = data.get("column_order") or canonical_order(nu)
        perm = _permutation_to_canonical(order, nu)
        out = []
        for r in rows:
            exps = r["exponents"]
            if len(exps) != 12 * nu:
                raise InstanceFormatError(f"row {r.get('label', '')!r} has {len(exps)} exponents")
            canon = [0] * (12 * nu)
            for src, dst in enumerate(perm):
                canon[dst] = exps[src]
            out.append(GluingRow(r["type"], canon, r.get("label", "")))
        return cls(nu, tuple(out))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: {exc}") from exc
        return cls.from_json(data)


def _permutation_to_canonical(order, nu):
    """For each source column, its canonical column."""
    if len(order) != 12 * nu:
        raise InstanceFormatError(f"column_order has {len(order)} entries, expected {12 * nu}")
    perm = []
    for tag in order:
        tet, i, j = parse_half_edge_tag(tag)
        if tet >= nu:
            raise InstanceFormatError(f"tag {tag!r} names tetrahedron {tet} but nu = {nu}")
        perm.append(column(tet, i, j))
    if sorted(perm) != list(range(12 * nu)):
        raise InstanceFormatError("column_order is not a permutation of the half-edges")
    return perm


@dataclass(frozen=True)
class DefPoint:
    """A vector of 12 * nu edge coordinates in canonical column order."""

    z: tuple

    def __post_init__(self):
        z = tuple(self.z)
        if not z or len(z) % 12:
            raise InstanceFormatError(f"point has {len(z)} coordinates, not a multiple of 12")
        tower = common_tower(z)
        object.__setattr__(self, "z", tuple(tower.coerce(x) for x in z))

    @property
    def nu(self):
        return len(self.z) // 12

    @property
    def tower(self):
        return self.z[0].tower

    def __getitem__(self, key):
        tet, i, j = key
        return self.z[column(tet, i, j)]

    def replace(self, key, value):
        z = list(self.z)
        z[column(*key)] = value
        return DefPoint(tuple(z))

    @classmethod
    def from_coordinates(cls, per_tet):
        """Build from a list of ``{(i, j): value}`` dicts, one per tetrahedron."""
        return cls(tuple(coords[e] for coords in per_tet for e in HALF_EDGES))

    def to_json(self):
        return [x.to_json() for x in self.z]

    @classmethod
    def from_json(cls, data):
        try:
            if isinstance(data, dict):
                tower = FieldTower.from_json(data["tower"])
                return cls(tuple(tower.parse(s) for s in data["z"]))
            return cls(tuple(FieldElement.from_json(x) for x in data))
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceFormatError(f"bad point data: {exc}") from exc

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json()) + "\n")

    @classmethod
    def load(cls, path):
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class RelationDescriptor:
    """One internal relation at vertex ``i`` of tetrahedron ``tet``.

    ``monomial``: ``-z_ij z_ik z_il = 1``; ``affine``: ``z_ik (1 - z_ij) = 1``.
    """

    kind: str
    tet: int
    i: int
    j: int
    k: int
    l: int

    @property
    def label(self):
        t, i, j, k, l = self.tet, self.i, self.j, self.k, self.l
        if self.kind == "monomial":
            return f"-z{i}{j} z{i}{k} z{i}{l} (tet {t})"
        return f"z{i}{k} (1 - z{i}{j}) (tet {t})"

    def columns(self):
        t = self.tet
        return tuple(column(t, self.i, m) for m in (self.j, self.k, self.l))


def internal_relation_rows(nu):
    """All ``4 nu`` monomial descriptors followed by all ``4 nu`` affine ones."""
    if nu < 1:
        raise ValueError("need at least one tetrahedron")
    out = {"monomial": [], "affine": []}
    for t in range(nu):
        for i in (1, 2, 3, 4):
            j = min(m for m in (1, 2, 3, 4) if m != i)
            k, l = even_completion(i, j)
            for kind in out:
                out[kind].append(RelationDescriptor(kind, t, i, j, k, l))
    return out["monomial"] + out["affine"]


def _check_nondegenerate(p):
    for c, x in enumerate(p.z):
        if x.is_zero() or x == 1:
            raise DegenerateCoordinateError(
                f"coordinate {VariableIndex.from_column(c).tag} equals {x}"
            )


def _monomial(p, exponents):
    value = p.tower.one()
    for c, e in enumerate(exponents):
        if e:
            value = value * p.z[c] ** e
    return value


def residual_labels(system):
    labels = [d.label for d in internal_relation_rows(system.nu)]
    labels += [r.label or f"{r.type} row {n}" for n, r in enumerate(system.rows)]
    return labels


def evaluate_residuals(system, p):
    """Values of all internal relations, then all gluing monomials."""
    if p.nu != system.nu:
        raise InstanceFormatError(f"point has {p.nu} tetrahedra, system has {system.nu}")
    _check_nondegenerate(p)
    out = []
    for d in internal_relation_rows(system.nu):
        zij, zik, zil = (p.z[c] for c in d.columns())
        out.append(-(zij * zik * zil) if d.kind == "monomial" else zik * (1 - zij))
    for r in system.rows:
        out.append(_monomial(p, r.exponents))
    return out


def first_failure(system, p):
    """``(index, label, value)`` of the first residual that is not 1, or None."""
    for n, (label, value) in enumerate(zip(residual_labels(system), evaluate_residuals(system, p))):
        if not value == 1:
            return n, label, value
    return None


def build_jacobian(system, p, affine_entry="z_il", check=True):
    """The log-basis Jacobian: IR rows (monomial, then affine), then gluing rows.

    For the affine rows ``affine_entry`` selects the entry in the ``z_ij``
    column: ``"z_il"`` puts ``z_il(p)`` there, ``"log"`` the exact
    log-derivative ``-z_ij / (1 - z_ij)``.  At an on-variety point both
    give the same kernel dimension.
    """
    if affine_entry not in ("z_il", "log"):
        raise ValueError("affine_entry must be 'z_il' or 'log'")
    if check:
        bad = first_failure(system, p)
        if bad is not None:
            raise OffVarietyError(*bad)
    else:
        _check_nondegenerate(p)
    tower = p.tower
    zero, one = tower.zero(), tower.one()
    n = system.ncols
    rows = []
    for d in internal_relation_rows(system.nu):
        row = [zero] * n
        cij, cik, cil = d.columns()
        if d.kind == "monomial":
            row[cij] = row[cik] = row[cil] = one
        else:
            row[cik] = one
            zij = p.z[cij]
            row[cij] = p.z[cil] if affine_entry == "z_il" else -zij / (1 - zij)
        rows.append(row)
    for r in system.rows:
        rows.append([tower.coerce(e) for e in r.exponents])
    return Matrix(rows, tower)


def tangent_basis(system, p, **kwargs):
    return kernel_basis(build_jacobian(system, p, **kwargs))


def tangent_dimension(system, p, **kwargs):
    return len(tangent_basis(system, p, **kwargs))


# -- deriving gluing equations from a triangulation ---------------------------

def derive_gluing_system(tetrahedra, face_pairings):
    """Face and edge equations of a triangulation given by vertex tags.

    ``tetrahedra`` lists each tetrahedron as a 4-tuple of vertex tags (vertex
    1 first).  Two faces carrying the same three tags are glued by the
    identity on tags; ``face_pairings`` lists further gluings as dicts
    mapping the three tags of a source face to those of its partner.
    Every face must be glued exactly once.
    """
    nu = len(tetrahedra)
    faces = {}
    for t, tags in enumerate(tetrahedra):
        if len(set(tags)) != 4:
            raise ValueError(f"tetrahedron {t} has repeated vertex tags")
        for l in (1, 2, 3, 4):
            faces[(t, l)] = frozenset(tags[m - 1] for m in (1, 2, 3, 4) if m != l)

    def find_face(tagset, exclude=None):
        hits = [f for f, s in faces.items() if s == tagset and f != exclude]
        return hits

    # partner[(t, l)] = ((t2, l2), vertex map from t's local labels to t2's)
    partner = {}

    def link(f1, f2, tagmap):
        t1, l1 = f1
        t2, l2 = f2
        local2 = {tag: m for m, tag in enumerate(tetrahedra[t2], start=1)}
        vmap = {}
        for m in (1, 2, 3, 4):
            if m != l1:
                vmap[m] = local2[tagmap[tetrahedra[t1][m - 1]]]
        vmap[l1] = l2
        inv = {v: k for k, v in vmap.items()}
        for f, g, mp in ((f1, f2, vmap), (f2, f1, inv)):
            if f in partner:
                raise ValueError(f"face {f} glued twice")
            partner[f] = (g, mp)

    for s in set(faces.values()):
        hits = find_face(s)
        if len(hits) == 2:
            link(hits[0], hits[1], {tag: tag for tag in s})
        elif len(hits) > 2:
            raise ValueError(f"tag set {sorted(s)} appears on {len(hits)} faces")
    for pairing in face_pairings:
        src, dst = frozenset(pairing), frozenset(pairing.values())
        a, b = find_face(src), find_face(dst)
        if len(a) != 1 or len(b) != 1:
            raise ValueError(f"face pairing {pairing} does not match unique faces")
        link(a[0], b[0], pairing)
    unglued = [f for f in faces if f not in partner]
    if unglued:
        raise ValueError(f"unglued faces: {unglued}")

    rows = []
    done = set()
    for f in sorted(faces):
        if f in done:
            continue
        g, _ = partner[f]
        done.update((f, g))
        exps = [0] * (12 * nu)
        for t, l in (f, g):
            for m in (1, 2, 3, 4):
                if m != l:
                    exps[column(t, m, l)] += 1
        rows.append(GluingRow("face", exps, f"face {_face_name(tetrahedra, f)} ~ {_face_name(tetrahedra, g)}"))

    # oriented edges (t, i, j) are identified across glued faces containing both ends
    parent = {}

    def root(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (t, l), ((t2, _), vmap) in partner.items():
        for i in (1, 2, 3, 4):
            for j in (1, 2, 3, 4):
                if i != j and l not in (i, j):
                    parent[root((t, i, j))] = root((t2, vmap[i], vmap[j]))
    classes = {}
    for t in range(nu):
        for i, j in HALF_EDGES:
            classes.setdefault(root((t, i, j)), []).append((t, i, j))
    for members in classes.values():
        if any(root((t, j, i)) == root(members[0]) for t, i, j in members):
            raise ValueError("an edge is identified with its own reverse")
    for members in sorted(classes.values()):
        exps = [0] * (12 * nu)
        for t, i, j in members:
            exps[column(t, i, j)] += 1
        t, i, j = members[0]
        ends = f"{tetrahedra[t][i - 1]} -> {tetrahedra[t][j - 1]}"
        rows.append(GluingRow("edge", exps, f"edge {ends} ({len(members)} half-edges)"))
    return GluingSystem(nu, tuple(rows))


def _face_name(tetrahedra, f):
    t, l = f
    tags = ",".join(tetrahedra[t][m - 1] for m in (1, 2, 3, 4) if m != l)
    return f"T{t}[{tags}]"


# -- raw matrix import ---------------------------------------------------------

def import_matrix_csv(csv_path, header_path):
    """Read an integer matrix (one row per line) with a sidecar JSON header.

    The header declares ``nu``, the source ``column_order`` as half-edge tags
    (``"t0:12"``), and optionally ``row_types`` and ``labels``.  Returns the
    system in canonical column order.
    """
    try:
        header = json.loads(Path(header_path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{header_path}: {exc}") from exc
    with open(csv_path, newline="") as fh:
        raw = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    try:
        matrix = [[int(c) for c in row] for row in raw]
    except ValueError as exc:
        raise InstanceFormatError(f"{csv_path}: non-integer entry ({exc})") from exc
    types = header.get("row_types") or ["face"] * len(matrix)
    labels = header.get("labels") or [""] * len(matrix)
    if len(types) != len(matrix) or len(labels) != len(matrix):
        raise InstanceFormatError("row_types/labels length does not match the matrix")
    data = {
        "nu": header.get("nu"),
        "column_order": header.get("column_order"),
        "rows": [{"type": t, "exponents": r, "label": lab} for t, r, lab in zip(types, matrix, labels)],
    }
    if data["nu"] is None:
        raise InstanceFormatError("header must declare nu")
    return GluingSystem.from_json(data)
