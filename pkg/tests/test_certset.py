import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qforge.adf.certset import CertSet
from qforge.errors import NotAlmostDisjointError, ParameterError

HORIZON = 200

cert_sets = st.builds(
    CertSet.from_progressions,
    st.lists(st.tuples(st.integers(0, 10), st.integers(1, 8)), max_size=3),
    add=st.lists(st.integers(0, 30), max_size=3),
    remove=st.lists(st.integers(0, 30), max_size=3),
)


def members(s, n=HORIZON):
    return set(s.elements_below(n))


class TestNormalForm:
    def test_canonical_modulus(self):
        a = CertSet.ap(0, 2).union(CertSet.ap(1, 2))
        assert a == CertSet.naturals()
        assert a.modulus == 1 and a.threshold == 0

    def test_canonical_threshold(self):
        a = CertSet.ap(7, 3)
        b = CertSet.from_progressions([(7, 3)], add=[4, 1])
        assert b == CertSet.ap(1, 3)

    def test_membership(self):
        s = CertSet.from_progressions([(2, 4)], add=[3], remove=[6])
        assert 3 in s and 2 in s and 10 in s
        assert 6 not in s and 4 not in s and -1 not in s

    def test_finite(self):
        s = CertSet.finite([5, 2, 9])
        assert not s.is_infinite()
        assert s.finite_elements() == [2, 5, 9]


class TestEnumeration:
    def test_nth_against_scan(self):
        s = CertSet.from_progressions([(1, 3), (0, 5)], add=[2], remove=[6])
        scan = s.elements_below(HORIZON)
        assert [s.nth(j) for j in range(len(scan))] == scan

    def test_rank_inverts_nth(self):
        s = CertSet.ap(3, 7)
        for j in (0, 1, 5, 20):
            assert s.rank(s.nth(j)) == j
        assert s.rank(4) is None

    @given(cert_sets, st.integers(0, 40))
    @settings(max_examples=60)
    def test_nth_is_increasing_enumeration(self, s, j):
        if s.is_empty():
            return
        if not s.is_infinite() and j >= len(s.below):
            return
        x = s.nth(j)
        assert x in s
        assert len(s.elements_below(x)) == j


class TestBooleanAlgebra:
    @given(cert_sets, cert_sets)
    @settings(max_examples=60)
    def test_pointwise_ops(self, a, b):
        ma, mb = members(a), members(b)
        assert members(a.union(b)) == ma | mb
        assert members(a.intersect(b)) == ma & mb
        assert members(a.diff(b)) == ma - mb

    @given(cert_sets)
    @settings(max_examples=40)
    def test_complement_involution(self, a):
        assert a.complement().complement() == a
        assert members(a.complement()) == set(range(HORIZON)) - members(a)

    def test_evens_odds_partition(self):
        evens, odds = CertSet.ap(0, 2), CertSet.ap(1, 2)
        assert evens.intersect(odds).is_empty()
        assert evens.union(odds) == CertSet.naturals()


class TestCertificates:
    def test_eq_star(self):
        a = CertSet.ap(0, 2)
        b = CertSet.from_progressions([(0, 2)], add=[3], remove=[0, 2])
        ok, exc = a.eq_star(b)
        assert ok and exc == [0, 2, 3]
        assert a.eq_star(CertSet.ap(1, 2)) == (False, None)

    def test_subset_star(self):
        a = CertSet.from_progressions([(0, 4)], add=[1, 5])
        ok, exc = a.subset_star(CertSet.ap(0, 2))
        assert ok and exc == [1, 5]
        assert CertSet.ap(0, 2).subset_star(CertSet.ap(0, 4)) == (False, None)

    def test_almost_disjoint(self):
        evens, odds = CertSet.ap(0, 2), CertSet.ap(1, 2)
        assert evens.almost_disjoint(odds) == []
        with pytest.raises(NotAlmostDisjointError) as e:
            evens.almost_disjoint(CertSet.ap(0, 4))
        a, d = e.value.witness
        assert all((a + d * k) % 4 == 0 for k in range(5))

    @given(cert_sets, cert_sets)
    @settings(max_examples=60)
    def test_certificates_replayable(self, a, b):
        ok, exc = a.eq_star(b)
        if ok:
            for n in range(HORIZON):
                assert ((n in a) == (n in b)) or n in exc
            assert all((x in a) != (x in b) for x in exc)


class TestConversions:
    def test_json_round_trip(self):
        s = CertSet.from_progressions([(2, 6), (1, 4)], add=[0], remove=[8])
        assert CertSet.from_json_obj(s.to_json_obj()) == s

    def test_indicator_tail(self):
        s = CertSet.from_progressions([(0, 3)], add=[1])
        t = s.indicator_tail()
        for i in range(30):
            assert t.value(i) == (1 if i in s else 0)

    @given(cert_sets, st.integers(1, 5), st.integers(0, 7))
    @settings(max_examples=60)
    def test_affine_image(self, s, m, b):
        img = s.affine_image(m, b)
        expect = {m * x + b for x in members(s)}
        assert members(img, m * HORIZON + b) == expect

    def test_bad_params(self):
        with pytest.raises(ParameterError):
            CertSet.ap(-1, 2)
        with pytest.raises(ParameterError):
            CertSet.ap(0, 0)
        with pytest.raises(ParameterError):
            CertSet.finite([3]).affine_image(0, 1)
