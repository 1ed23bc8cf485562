import numpy as np
import pytest

from multitile import (
    AdmissibilityCertificate,
    AdmissibilityFailure,
    NoPairFound,
    check,
    find_pair,
    perfect_shift_1d,
)

from builders import ALL, PERFECT, domain_of


def test_interval_perfect():
    dom = ALL["interval_2tile"]()
    cert = check(dom, [1], [2])
    assert isinstance(cert, AdmissibilityCertificate)
    assert cert.kind == "perfect"
    assert cert.delta == (0.5,)


def test_split_collision_witness():
    dom = ALL["split_2tile"]()
    fail = check(dom, [1], [2])
    assert isinstance(fail, AdmissibilityFailure)
    assert fail.cell == 0 and fail.level == 1
    assert set(fail.pair) == {0.0, 2.0}
    assert "mod 2" in fail.message


def test_split_strong_at_q3():
    dom = ALL["split_2tile"]()
    cert = check(dom, [1], [3])
    assert isinstance(cert, AdmissibilityCertificate)
    assert cert.kind == "strong"  # q=3 differs from the common child count 2


def test_find_pair_prefers_perfect():
    for name in PERFECT:
        cert = find_pair(ALL[name]())
        assert cert.kind == "perfect", name


def test_find_pair_strong_fallback():
    cert = find_pair(ALL["split_2tile"]())
    assert cert.kind == "strong"
    assert (tuple(cert.v), tuple(cert.q)) == ((1,), (3,))
    cert = find_pair(ALL["twocell_2tile_1d"]())
    assert cert.kind == "strong"


def test_find_pair_k1():
    dom = domain_of([[1.0]], [([[0, 1]], [[0]])])
    cert = find_pair(dom)
    assert cert.kind == "perfect"
    assert dom.k == 1


def test_no_pair_found():
    dom = ALL["split_2tile"]()
    with pytest.raises(NoPairFound):
        find_pair(dom, v_max=1, q_max=2)  # q=2 collides, no room to move


def test_check_validates_inputs():
    dom = ALL["interval_2tile"]()
    with pytest.raises(Exception):
        check(dom, [1, 1], [2, 2])  # wrong dimension
    with pytest.raises(Exception):
        check(dom, [1], [0])  # modulus must be positive


def test_certificate_witnesses_cover_levels():
    dom = ALL["plane_4tile_2d"]()
    cert = find_pair(dom)
    assert cert.kind == "perfect"
    levels = {w.level for w in cert.witnesses}
    assert levels == {1, 2}
    for w in cert.witnesses:
        r = np.asarray(w.residues)
        assert len(np.unique(np.round(r, 6))) == len(r)


@pytest.mark.parametrize(
    "offsets,tau",
    [([0, 1], 1.0), ([0, 2], 0.5), ([0, 2, 4], 0.5)],
)
def test_perfect_shift_1d_worked(offsets, tau):
    assert perfect_shift_1d(np.array(offsets)) == pytest.approx(tau)


def test_perfect_shift_1d_failures():
    # residues 0,2,0 mod 3 collide, so no shift makes the system unitary
    assert perfect_shift_1d(np.array([0, 2, 3])) is None
    assert perfect_shift_1d(np.array([0, 4])) == pytest.approx(0.25)
    assert perfect_shift_1d(np.array([5])) == pytest.approx(1.0)  # k=1


def test_admissibility_is_offset_property():
    """The certificate depends only on offsets, not boxes or basis."""
    a = domain_of([[1.0]], [([[0, 1]], [[0], [2]])])
    b = domain_of([[3.0]], [([[0, 1]], [[0], [2]])])
    ca, cb = find_pair(a), find_pair(b)
    assert (tuple(ca.v), tuple(ca.q), ca.kind) == (tuple(cb.v), tuple(cb.q), cb.kind)
