import math
from fractions import Fraction

import pytest

from error_handler import CapExceeded
from partitions import enumerate_spp, validate_spp
from process import (
    MqParams,
    SpecializationChain,
    macmahon_by_enumeration,
    macmahon_coeffs,
    macmahon_product,
    marginal_weight,
    mq_chain,
    mq_partition_function,
    mq_sequence,
    mq_weight,
    partition_function,
    prob,
    weight_w,
)
from schur import Specialization


@pytest.fixture
def one_step_chain():
    return SpecializationChain((Specialization((Fraction(1, 3),)),), (Specialization((Fraction(1, 4),)),))


def test_one_step_chain(one_step_chain):
    s, t = Fraction(1, 3), Fraction(1, 4)
    assert weight_w([(1,)], [], one_step_chain) == 2 * s * t
    assert partition_function(one_step_chain) == (1 + s * t) / (1 - s * t)
    assert prob([(1,)], one_step_chain) == 2 * s * t * (1 - s * t) / (1 + s * t)
    assert prob([()], one_step_chain) == (1 - s * t) / (1 + s * t)


def test_weight_needs_matching_lengths(one_step_chain):
    with pytest.raises(ValueError):
        weight_w([(1,), (1,)], [], one_step_chain)
    with pytest.raises(ValueError):
        marginal_weight([], one_step_chain)


def test_marginal_weight_sums_over_mu():
    x = Specialization((Fraction(1, 2),))
    chain = SpecializationChain((x, x), (x, x))
    lam = [(2, 1), (2,)]
    direct = sum(weight_w(lam, [mu], chain) for mu in [(), (1,), (2,)])
    assert marginal_weight(lam, chain) == direct


def test_chain_serialization(one_step_chain):
    data = one_step_chain.to_dict()
    assert data == {"T": 1, "plus": [["1/3"]], "minus": [["1/4"]]}
    assert SpecializationChain.from_json(one_step_chain.to_json()) == one_step_chain
    with pytest.raises(ValueError):
        SpecializationChain.from_dict({"T": 2, "plus": [[]], "minus": [[]]})
    with pytest.raises(ValueError):
        SpecializationChain((), ())


def test_mq_params():
    params = MqParams("1/4", 3)
    assert params.q == Fraction(1, 4)
    assert params.exact
    assert params.r == pytest.approx(math.log(4))
    assert MqParams.default_window(0.1, 2, 1e-12) >= 14
    assert MqParams.for_times(0.1, [-3, 1]).window >= 15
    for bad in (0, 1, 1.5, "-1/2"):
        with pytest.raises(ValueError):
            MqParams(bad)


def test_mq_chain_layout():
    chain = mq_chain(MqParams(Fraction(1, 4), 2))
    assert chain.T == 5
    # slots 1..5 carry the diagonals -2..2
    assert chain.rho_plus(0) == Specialization((Fraction(1, 32),))
    assert chain.rho_plus(2) == Specialization((Fraction(1, 2),))
    assert chain.rho_plus(3) == Specialization()
    assert chain.rho_minus(3) == Specialization((Fraction(1, 2),))
    assert chain.rho_minus(5) == Specialization((Fraction(1, 32),))
    assert chain.rho_minus(1) == Specialization()


def test_mq_sequence_window():
    pi = validate_spp([[2, 1], [1]])
    assert [lam.parts for lam in mq_sequence(pi, 1)] == [(1,), (2,), (1,)]
    with pytest.raises(ValueError):
        mq_sequence(validate_spp([[3, 2, 1]]), 1)


def test_figure_weight(figure_spp):
    q = Fraction(1, 4)
    assert mq_weight(figure_spp, q) == 2 ** 7 * q ** 35


def test_weight_equals_process_weight():
    for q in (Fraction(1, 4), Fraction(1, 9)):
        for pi in enumerate_spp(5):
            mq_weight(pi, q, verify=True)


def test_windowed_partition_function_tends_to_product():
    assert float(mq_partition_function(MqParams(0.1, 12))) == pytest.approx(macmahon_product(0.1), rel=1e-10)
    assert mq_partition_function(MqParams(Fraction(1, 10), 1)) == (
        Fraction(11, 9) * Fraction(101, 99) ** 2 * Fraction(1001, 999)
    )


def test_windowed_partition_function_is_the_sum_of_weights():
    params = MqParams(Fraction(1, 16), 3)
    chain = mq_chain(params)
    assert partition_function(chain) == mq_partition_function(params)

    by_volume = [Fraction(0)] * 7
    for pi in enumerate_spp(6):
        if max(pi.t_left, pi.t_right) <= params.window:
            by_volume[pi.volume] += prob(mq_sequence(pi, params.window), chain)
    partial = [sum(by_volume[:v + 1]) for v in range(7)]
    assert partial[0] == 1 / partition_function(chain)
    assert all(a < b for a, b in zip(partial, partial[1:]))
    assert 0 < 1 - partial[-1] < Fraction(1, 10 ** 5)


def test_macmahon_low_order():
    assert macmahon_coeffs(3) == [1, 2, 6, 16]
    assert macmahon_coeffs(0) == [1]
    with pytest.raises(CapExceeded):
        macmahon_coeffs(25)


def test_macmahon_matches_enumeration_to_ten():
    coeffs = macmahon_coeffs(10)
    assert len(coeffs) == 11
    assert coeffs == macmahon_by_enumeration(10)


def test_macmahon_product_series():
    q = 0.05
    partial = sum(c * q ** n for n, c in enumerate(macmahon_coeffs(20)))
    assert macmahon_product(q) == pytest.approx(partial, rel=1e-13)
