from __future__ import annotations

import itertools
import random

import pytest

from plbc.algebra import BitMatrix, BitVector, rank_of_rows
from plbc.code import plbc_from_generators
from plbc.codec import (
    DefectVector,
    apply_defects,
    coset_leaders,
    decode_pcc,
    decode_plbc,
    encode,
    encode_one_step,
    encode_optimal,
    encode_two_step,
    select_locations,
    unmasked_count,
)
from plbc.errors import InvalidCode, UnsupportedComputation


def bv(s):
    return BitVector.from_str(s)


def random_plbc(rng, n, k, l):
    while True:
        G1 = BitMatrix(n, tuple(rng.getrandbits(n) for _ in range(k)))
        G0 = BitMatrix(n, tuple(rng.getrandbits(n) for _ in range(l)))
        try:
            return plbc_from_generators(G1, G0)
        except InvalidCode:
            continue


def all_defects(n, u):
    for sub in itertools.combinations(range(n), u):
        for vals in itertools.product((0, 1), repeat=u):
            yield DefectVector.from_pairs(n, zip(sub, vals))


# -- defect vectors and channel -------------------------------------------------


def test_defect_vector_parse_and_format():
    s = DefectVector.parse(7, "2:1 5:0")
    assert s.positions() == [2, 5]
    assert s.u == 2
    assert str(s) == "2:1 5:0"
    assert DefectVector.parse(7, "").u == 0


@pytest.mark.parametrize("text", ["2", "2:2", "9:1", "1:1 1:0", "a:1"])
def test_defect_vector_parse_errors(text):
    with pytest.raises(ValueError):
        DefectVector.parse(7, text)


def test_apply_defects_examples():
    s = DefectVector.parse(4, "2:1")
    assert str(apply_defects(bv("0000"), s)) == "0010"
    assert apply_defects(bv("1011"), DefectVector.none(4)) == bv("1011")
    assert str(apply_defects(bv("0000"), DefectVector.none(4), bv("1000"))) == "1000"


def test_apply_defects_length_mismatch():
    with pytest.raises(ValueError):
        apply_defects(bv("000"), DefectVector.none(4))


def test_unmasked_count_examples():
    assert unmasked_count(bv("10"), DefectVector.none(2)) == 0
    assert unmasked_count(bv("10"), DefectVector.parse(2, "0:1 1:0")) == 0
    assert unmasked_count(bv("10"), DefectVector.parse(2, "0:0")) == 1


def test_select_locations():
    assert select_locations([2, 5, 9], 2) == [9, 5]
    assert select_locations([5, 2, 9], 3) == [9, 5, 2]
    assert select_locations([0], 1) == [0]
    with pytest.raises(ValueError):
        select_locations([1, 2], 3)
    picked = select_locations([1, 4, 6, 8], 2, random.Random(1))
    assert len(picked) == 2 and picked == sorted(picked, reverse=True)


# -- encoders on the n = 2 code ----------------------------------------------------


def test_optimal_examples(code_n2):
    w = bv("1")
    r = encode_optimal(code_n2, w, DefectVector.parse(2, "0:0"))
    assert (str(r.d), str(r.codeword), r.unmasked, r.step) == ("1", "01", 0, "exhaustive")
    r = encode_optimal(code_n2, w, DefectVector.parse(2, "0:1 1:0"))
    assert (str(r.d), str(r.codeword), r.unmasked) == ("0", "10", 0)
    r = encode_optimal(code_n2, w, DefectVector.parse(2, "0:1 1:1"))
    assert (str(r.d), r.unmasked) == ("0", 1)


def test_one_step_example(code_n2):
    r = encode_one_step(code_n2, bv("1"), DefectVector.parse(2, "0:1 1:1"))
    assert str(r.codeword) == "01"
    assert r.unmasked == 1


def test_one_step_empty_system(code_n7):
    r = encode_one_step(code_n7, bv("101"), DefectVector.none(7))
    assert r.d.bits == 0 and r.unmasked == 0


def test_two_step_example(code_n2):
    r = encode_two_step(code_n2, bv("1"), DefectVector.parse(2, "0:1 1:1"))
    assert r.step == "step2"
    assert r.unmasked == 1
    assert str(r.codeword) == "01"


def test_two_step_consistent_beyond_d0(code_n7):
    """Some u = 4 pattern on the [7,3,4] code is masked completely."""
    found = None
    for s in all_defects(7, 4):
        r = encode_two_step(code_n7, bv("110"), s)
        if r.step == "step1":
            found = (s, r)
            break
    assert found is not None
    assert found[1].unmasked == 0


def test_encode_result_csv(code_n2):
    r = encode(code_n2, bv("1"), DefectVector.parse(2, "0:1 1:1"), "two-step")
    assert r.csv_row() == "01,1,1,step2"


def test_unknown_scheme(code_n2):
    with pytest.raises(ValueError):
        encode(code_n2, bv("1"), DefectVector.none(2), "three-step")


def test_optimal_refuses_large_l():
    rng = random.Random(0)
    code = random_plbc(rng, 24, 2, 21)
    with pytest.raises(UnsupportedComputation):
        encode_optimal(code, BitVector.zeros(2), DefectVector.none(24))


def test_message_length_checked(code_n7):
    with pytest.raises(ValueError):
        encode_two_step(code_n7, bv("1"), DefectVector.none(7))


# -- encoder properties -------------------------------------------------------------


def test_u_below_d0_always_masked(code_n7, code_n31):
    rng = random.Random(9)
    for code in (code_n7, code_n31):
        for _ in range(300):
            u = rng.randrange(code.d0)
            sub = rng.sample(range(code.n), u)
            s = DefectVector.from_pairs(code.n, [(i, rng.getrandbits(1)) for i in sub])
            w = BitVector(code.k, rng.getrandbits(code.k))
            assert encode_one_step(code, w, s).unmasked == 0
            r = encode_two_step(code, w, s)
            assert r.unmasked == 0 and r.step == "trivial"


def _check_equivalences(code, w, s):
    opt = encode_optimal(code, w, s)
    one = encode_one_step(code, w, s)
    two = encode_two_step(code, w, s)
    psi = s.positions()
    cols = [code.g0_cols[i] for i in psi]
    b = [((w.bits & code.g1_cols[i]).bit_count() & 1) ^ s.stuck_value(i) for i in psi]
    aug = [c | (bit << code.l) for c, bit in zip(cols, b)]
    rank_equal = rank_of_rows(cols) == rank_of_rows(aug)
    step1 = two.step in ("step1", "trivial")
    assert step1 == rank_equal == (opt.unmasked == 0)
    assert two.unmasked <= one.unmasked
    if two.step == "step2":
        assert (two.codeword, two.d, two.unmasked) == (one.codeword, one.d, one.unmasked)
    # the selected locations are masked exactly
    m = min(code.d0 - 1, s.u)
    for i in select_locations(psi, m):
        assert one.codeword[i] == s.stuck_value(i)
    assert one.unmasked <= s.u - m
    assert opt.unmasked <= two.unmasked
    for r in (opt, one, two):
        assert r.codeword == code.encode_raw(w, r.d)
        assert r.unmasked == unmasked_count(r.codeword, s)


def test_equivalences_n7_sampled(code_n7):
    rng = random.Random(4)
    for _ in range(400):
        u = rng.randint(0, 7)
        sub = rng.sample(range(7), u)
        s = DefectVector.from_pairs(7, [(i, rng.getrandbits(1)) for i in sub])
        _check_equivalences(code_n7, BitVector(3, rng.getrandbits(3)), s)


def test_equivalences_random_plbc():
    rng = random.Random(12)
    for _ in range(30):
        n = rng.randint(4, 12)
        l = rng.randint(1, min(8, n - 1))
        k = rng.randint(1, n - l)
        code = random_plbc(rng, n, k, l)
        for _ in range(30):
            u = rng.randint(0, n)
            sub = rng.sample(range(n), u)
            s = DefectVector.from_pairs(n, [(i, rng.getrandbits(1)) for i in sub])
            _check_equivalences(code, BitVector(k, rng.getrandbits(k)), s)


# -- decoding ------------------------------------------------------------------------


def test_round_trip_below_d0(code_n7, code_n7_r3):
    for code in (code_n7, code_n7_r3):
        for wbits in range(1 << code.k):
            w = BitVector(code.k, wbits)
            for u in range(code.d0):
                for s in all_defects(code.n, u):
                    for enc in (encode_one_step, encode_two_step):
                        y = apply_defects(enc(code, w, s).codeword, s)
                        assert decode_plbc(code, y)[0] == w
                        assert decode_pcc(code.spec, code, y) == w


def test_decode_corrects_single_error(code_n7_r3):
    code = code_n7_r3
    for wbits in (0, 1):
        w = BitVector(1, wbits)
        for dbits in range(8):
            c = code.encode_raw(w, BitVector(3, dbits))
            for e in range(7):
                y = BitVector(7, c.bits ^ (1 << e))
                w_hat, z_hat = decode_plbc(code, y)
                assert w_hat == w
                assert z_hat.bits == 1 << e


def test_decode_two_errors_is_not_an_error(code_n7_r3):
    c = code_n7_r3.encode_raw(bv("1"), bv("000"))
    w_hat, _ = decode_plbc(code_n7_r3, BitVector(7, c.bits ^ 0b11))
    assert w_hat.length == 1


def test_capability_second_branch(code_n7_r3):
    """u = d0 = 3, t = 0: one defect may stay unmasked, and the decoder corrects it."""
    code = code_n7_r3
    from plbc.code import capability

    assert capability(code, 3, 0)
    for wbits in (0, 1):
        w = BitVector(1, wbits)
        for s in all_defects(7, 3):
            r = encode_two_step(code, w, s)
            assert r.unmasked <= 1
            y = apply_defects(r.codeword, s)
            assert decode_plbc(code, y)[0] == w


def test_decode_pcc_examples(code_n7_r3):
    code = code_n7_r3
    g1 = code.spec.g1.to_vector(7)
    assert decode_pcc(code.spec, code, g1) == bv("1")
    assert decode_pcc(code.spec, code, BitVector.zeros(7)) == bv("0")


def test_decode_pcc_agrees_with_plbc(code_n7_r3):
    rng = random.Random(21)
    code = code_n7_r3
    for _ in range(1000):
        w = BitVector(1, rng.getrandbits(1))
        c = code.encode_raw(w, BitVector(3, rng.getrandbits(3)))
        assert decode_pcc(code.spec, code, c) == decode_plbc(code, c)[0] == w


def test_coset_leaders_minimum_weight(code_n7_r3):
    table = coset_leaders(code_n7_r3)
    assert len(table) == 8
    assert table[0] == 0
    assert sorted(z.bit_count() for z in table.values()) == [0] + [1] * 7


def test_coset_leader_ties_smallest_integer():
    # n = 3, k = l = 1: H = (1 1 1), so every unit vector has syndrome 1
    code = plbc_from_generators(BitMatrix.from_strs(["110"]), BitMatrix.from_strs(["011"]))
    assert code.r == 1
    table = coset_leaders(code)
    assert table[1] == 0b001
