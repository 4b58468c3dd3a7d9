import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as hs

from twistcon import artin

FROZEN_M3 = [1, 0, 8, 8, 44, 48, 196, 216, 812, 896, 3284]


def string_oracle(m, n):
    """Count freely reduced strings over x, y whose maximal runs form a valid form."""
    count = 0
    for w in itertools.product("xXyY", repeat=n):
        if any(a != b and a.lower() == b.lower() for a, b in zip(w, w[1:])):
            continue
        if artin.MinForm.from_word(m, "".join(w)).is_valid():
            count += 1
    return count


def test_frozen_m3_counts():
    assert artin.count_min_forms(3, 10) == FROZEN_M3


@pytest.mark.parametrize("m", [3, 5, 7])
def test_dp_matches_block_enumeration(m):
    assert artin.count_min_forms(m, 9) == artin.brute_force_counts(m, 9)


@pytest.mark.parametrize("m", [3, 5])
def test_dp_matches_string_oracle(m):
    g = artin.count_min_forms(m, 7)
    assert g == [string_oracle(m, n) for n in range(8)]


@pytest.mark.parametrize("m", [3, 5, 7])
def test_enumerated_forms_are_valid_and_distinct(m):
    for n in range(8):
        forms = list(artin.enumerate_min_forms(m, n))
        assert all(f.is_valid() and f.length == n for f in forms)
        assert len({f.word() for f in forms}) == len(forms)


def test_empty_word():
    assert artin.count_min_forms(5, 0) == [1]
    e = artin.MinForm(3, (0,), (0,))
    assert e.is_valid() and e.word() == "" and artin.MinForm.from_word(3, "") == e


def test_validation_messages():
    with pytest.raises(ValueError, match=r"\(i\)"):
        artin.MinForm(3, (0, 1), (1, 1)).validate()
    with pytest.raises(ValueError, match=r"\(ii\)"):
        artin.MinForm(3, (1, 2), (1, 1)).validate()
    with pytest.raises(ValueError, match=r"\(iii\)"):
        artin.MinForm(3, (1, 1), (2, 1)).validate()
    with pytest.raises(ValueError, match="maximal"):
        artin.MinForm(5, (1, 1), (0, 1)).validate()


@given(hs.sampled_from([3, 5, 7]), hs.integers(0, 8), hs.data())
def test_word_roundtrip(m, n, data):
    forms = list(artin.enumerate_min_forms(m, n))
    if forms:
        f = data.draw(hs.sampled_from(forms))
        assert artin.MinForm.from_word(m, f.word()) == f


def test_from_word_rejects_unreduced():
    with pytest.raises(ValueError):
        artin.MinForm.from_word(3, "xX")


@pytest.mark.parametrize("m", [1, 2, 4, 0])
def test_invalid_m(m):
    with pytest.raises(ValueError):
        artin.count_min_forms(m, 3)


@pytest.mark.parametrize("m", [3, 5, 7])
def test_exponential_growth(m):
    g = artin.count_min_forms(m, 40)
    assert g[40] / g[38] > 1


def test_bound_series():
    series, g = artin.tcr_upper_series(3, 50)
    assert series[50].ratio == Fraction(1, 100) == artin.bound_ratio(50)
    assert all("upper-bound" in e.flags for e in series.entries)
    assert g[:11] == FROZEN_M3


def test_artin_csv():
    lines = artin.artin_csv(3, 4).splitlines()
    assert lines[0] == "n,g,g_over_2n,bound_1_over_2n"
    assert lines[2] == "2,8,2,1/4"
