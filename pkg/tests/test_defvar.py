import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl3whitehead.defvar import (
    DefPoint,
    DegenerateCoordinateError,
    GluingRow,
    GluingSystem,
    InstanceFormatError,
    OffVarietyError,
    VariableIndex,
    build_jacobian,
    canonical_order,
    column,
    derive_gluing_system,
    evaluate_residuals,
    first_failure,
    half_edge_tag,
    import_matrix_csv,
    internal_relation_rows,
    parse_half_edge_tag,
    tangent_dimension,
)
from sl3whitehead.exactfield import QQ
from sl3whitehead.linalg import Matrix, kernel_basis, rank
from sl3whitehead.whitehead import load_instance

INST = load_instance()
SYSTEM, POINT = INST.gluing, INST.point


def test_column_layout():
    assert column(0, 1, 2) == 0
    assert column(1, 4, 3) == 23
    assert VariableIndex.from_column(23).tag == "t1:43"
    assert parse_half_edge_tag(half_edge_tag(3, 2, 4)) == (3, 2, 4)
    with pytest.raises(InstanceFormatError):
        parse_half_edge_tag("t0:11")


def test_relation_descriptors():
    rows = internal_relation_rows(1)
    assert [d.kind for d in rows] == ["monomial"] * 4 + ["affine"] * 4
    assert [(d.i, d.j, d.k, d.l) for d in rows[:4]] == [(1, 2, 3, 4), (2, 1, 4, 3), (3, 1, 2, 4), (4, 1, 3, 2)]
    assert len(internal_relation_rows(4)) == 32


def test_residuals_at_reference_point():
    res = evaluate_residuals(SYSTEM, POINT)
    assert len(res) == 48
    assert all(r == 1 for r in res)
    assert first_failure(SYSTEM, POINT) is None


def test_gluing_row_shapes():
    rows = SYSTEM.rows
    assert sorted(sum(r.exponents) for r in rows if r.type == "face") == [6] * 8
    assert sorted({sum(r.exponents) for r in rows if r.type == "edge"}) <= [4, 8]


def test_derived_system_matches_bundled():
    derived = derive_gluing_system(INST.tetrahedra, [p["map"] for p in INST.face_pairings])
    assert sorted(r.exponents for r in derived.rows) == sorted(r.exponents for r in SYSTEM.rows)


def test_perturbed_point_is_off_variety():
    bad = POINT.replace((0, 1, 2), POINT[(0, 1, 2)] * 2)
    index, label, value = first_failure(SYSTEM, bad)
    assert index < 48 and not value == 1
    with pytest.raises(OffVarietyError):
        build_jacobian(SYSTEM, bad)


def test_degenerate_coordinate():
    with pytest.raises(DegenerateCoordinateError):
        evaluate_residuals(SYSTEM, POINT.replace((0, 1, 2), QQ(1)))


def test_jacobian_rows():
    jac = build_jacobian(SYSTEM, POINT)
    assert jac.shape == (48, 48)
    for r in range(16):
        assert sum(1 for x in jac.row(r) if x == 1) == 3 and sum(1 for x in jac.row(r) if not x.is_zero()) == 3
    for d, r in zip(internal_relation_rows(4)[16:], range(16, 32)):
        cij, cik, cil = d.columns()
        assert jac[r, cik] == 1 and jac[r, cij] == POINT.z[cil]
    assert tangent_dimension(SYSTEM, POINT) == 4
    assert tangent_dimension(SYSTEM, POINT, affine_entry="log") == 4


def test_duplicate_row_keeps_kernel():
    dup = SYSTEM.with_rows(SYSTEM.rows + (SYSTEM.rows[0],))
    assert tangent_dimension(dup, POINT) == 4


def test_identity_jacobian_has_trivial_kernel():
    assert kernel_basis(Matrix.identity(48)) == []


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10**6))
def test_column_permutation_invariance(seed):
    rng = random.Random(seed)
    order = canonical_order(4)
    rng.shuffle(order)
    perm = [parse_half_edge_tag(t) for t in order]
    data = {
        "nu": 4,
        "column_order": order,
        "rows": [{"type": r.type, "label": r.label,
                  "exponents": [r.exponents[column(*p)] for p in perm]} for r in SYSTEM.rows],
    }
    assert GluingSystem.from_json(data) == SYSTEM
    # the permuted matrix itself, as a plain matrix, has the same kernel dimension
    jac = build_jacobian(SYSTEM, POINT)
    cols = [column(*p) for p in perm]
    permuted = Matrix([[row[c] for c in cols] for row in jac.entries], jac.tower)
    assert len(kernel_basis(permuted)) == 4
    assert rank(permuted) == 44


def test_importer_round_trip(tmp_path):
    order = list(reversed(canonical_order(4)))
    csv_path, header = tmp_path / "m.csv", tmp_path / "h.json"
    lines = [",".join(str(r.exponents[column(*parse_half_edge_tag(t))]) for t in order) for r in SYSTEM.rows]
    csv_path.write_text("\n".join(lines) + "\n")
    header.write_text(json.dumps({"nu": 4, "column_order": order,
                                  "row_types": [r.type for r in SYSTEM.rows],
                                  "labels": [r.label for r in SYSTEM.rows]}))
    assert import_matrix_csv(csv_path, header) == SYSTEM


def test_importer_rejects_bad_input(tmp_path):
    csv_path, header = tmp_path / "m.csv", tmp_path / "h.json"
    csv_path.write_text("1,x\n")
    header.write_text(json.dumps({"nu": 1}))
    with pytest.raises(InstanceFormatError):
        import_matrix_csv(csv_path, header)
    with pytest.raises(InstanceFormatError):
        GluingRow("vertex", (0,))


def test_system_and_point_files_round_trip(tmp_path):
    SYSTEM.save(tmp_path / "s.json")
    POINT.save(tmp_path / "p.json")
    assert GluingSystem.load(tmp_path / "s.json") == SYSTEM
    assert DefPoint.load(tmp_path / "p.json") == POINT
