import numpy as np
import pytest

from weylnichols.rootsys import (
    ExcType, build_root_system, diagram_automorphism, matrix_of, matrix_permutation, permutation_matrix,
    simple_reflection, word_permutation,
)

ROOTS = {"G2": 12, "F4": 48, "E6": 72, "E7": 126, "E8": 240}
HIGHEST = {
    "G2": (3, 2), "F4": (2, 3, 4, 2), "E6": (1, 2, 2, 3, 2, 1), "E7": (2, 2, 3, 4, 3, 2, 1),
    "E8": (2, 3, 4, 6, 5, 4, 3, 2),
}
BOND_ORDER = {0: 2, 1: 3, 2: 4, 3: 6}


@pytest.mark.parametrize("label", list(ROOTS))
def test_root_counts_and_signs(label):
    rs = build_root_system(ExcType.parse(label))
    assert rs.nroots == ROOTS[label]
    for r in rs.roots:
        assert (r >= 0).all() or (r <= 0).all()
    assert sum(1 for r in rs.roots if (r >= 0).all()) == ROOTS[label] // 2
    heights = rs.roots.sum(axis=1)
    assert tuple(rs.roots[int(np.argmax(heights))]) == HIGHEST[label]


@pytest.mark.parametrize("label", list(ROOTS))
def test_form_is_reflection_invariant(label):
    rs = build_root_system(ExcType.parse(label))
    b = rs.form
    assert (b == b.T).all()
    for i in range(rs.rank):
        m = matrix_of(rs, [i])
        assert (m.T @ b @ m == b).all()


@pytest.mark.parametrize("label", list(ROOTS))
def test_coxeter_relations(label):
    rs = build_root_system(ExcType.parse(label))
    s = [simple_reflection(rs, i) for i in range(rs.rank)]
    a = rs.cartan
    for i in range(rs.rank):
        assert (s[i] * s[i]).is_identity()
        for j in range(i + 1, rs.rank):
            m = BOND_ORDER[int(a[i][j] * a[j][i])]
            p = s[i] * s[j]
            assert (p ** m).is_identity()
            assert all(not (p ** k).is_identity() for k in range(1, m))


@pytest.mark.parametrize("label", ["G2", "F4", "E6"])
def test_matrix_and_permutation_views_agree(label):
    rs = build_root_system(ExcType.parse(label))
    word = [0, 1, 0, rs.rank - 1, 1]
    p = word_permutation(rs, word)
    m = matrix_of(rs, word)
    assert (permutation_matrix(rs, p) == m).all()
    assert matrix_permutation(rs, m) == p


@pytest.mark.parametrize("label", ["G2", "F4", "E6"])
def test_diagram_symmetry_normalizes_the_group(label):
    rs = build_root_system(ExcType.parse(label))
    phi = diagram_automorphism(rs)
    s = [simple_reflection(rs, i) for i in range(rs.rank)]
    images = {phi * si * phi.inverse() for si in s}
    assert images == set(s)


def test_no_diagram_symmetry_for_e7_e8():
    for label in ("E7", "E8"):
        with pytest.raises(ValueError):
            diagram_automorphism(build_root_system(ExcType.parse(label)))


def test_parse_rejects_unknown_type():
    with pytest.raises(ValueError):
        ExcType.parse("B3")
