from fractions import Fraction

import pytest

from smartban_saca.errors import StageOutOfRange
from smartban_saca.protocol_params import CPParams, UserPriority, contention_probability, schedule, up_parameters

from oracles import TABLE, rule_alpha


def test_exactly_four_priorities():
    assert [int(u) for u in UserPriority] == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        UserPriority(4)
    with pytest.raises(ValueError):
        up_parameters(-1)


@pytest.mark.parametrize(
    "up, cp_max, cp_min, r",
    [
        (0, Fraction(1, 8), Fraction(1, 16), 2),
        (1, Fraction(1, 4), Fraction(1, 16), 4),
        (2, Fraction(1, 2), Fraction(1, 8), 4),
        (3, Fraction(1), Fraction(1, 2), 2),
    ],
)
def test_table_rows(up, cp_max, cp_min, r):
    params = up_parameters(up)
    assert params == CPParams(cp_max, cp_min, r)
    assert params.cp_max / params.cp_min == params.r


def test_cpparams_rejects_inconsistent_r():
    with pytest.raises(ValueError):
        CPParams(Fraction(1, 4), Fraction(1, 16), 2)
    with pytest.raises(ValueError):
        CPParams(Fraction(1, 16), Fraction(1, 4), 4)


@pytest.mark.parametrize(
    "up, k, expected",
    [(1, 0, Fraction(1, 4)), (1, 4, Fraction(1, 16)), (3, 1, Fraction(1))],
)
def test_contention_probability_examples(up, k, expected):
    assert contention_probability(up, k) == expected


@pytest.mark.parametrize("k", [-1, 5, 2.0])
def test_stage_out_of_range(k):
    with pytest.raises(StageOutOfRange):
        contention_probability(1, k)


@pytest.mark.parametrize("up", range(4))
def test_schedule_shape(up):
    a = schedule(up)
    params = up_parameters(up)
    assert a[0] == params.cp_max
    assert a[-1] == params.cp_min
    assert all(x >= y for x, y in zip(a, a[1:]))
    for k in range(len(a) - 2):
        assert a[k] / a[k + 2] == 2
    for m in range(0, len(a) - 1, 2):
        assert a[m] == a[m + 1]


@pytest.mark.parametrize("up", range(4))
def test_schedule_matches_literal_rule(up):
    # the halving rule, applied failure by failure, lands on the same schedule
    for k in range(up_parameters(up).r + 1):
        assert contention_probability(up, k) == rule_alpha(up, k)
    assert (up_parameters(up).cp_max, up_parameters(up).cp_min) == TABLE[up]
