import itertools

import numpy as np
import pytest

from orbgrand_ai.codes import (
    DEFAULT_CRC12,
    LinearCode,
    all_codewords,
    code_from_config,
    crc_new,
    crc_remainder,
    encode,
    full_space,
    gf2_rank,
    is_codeword,
    rlc_new,
    syndrome,
)


def naive_gf2_product(a, b):
    rows, inner = a.shape
    cols = b.shape[1]
    out = np.zeros((rows, cols), dtype=int)
    for i in range(rows):
        for j in range(cols):
            acc = 0
            for t in range(inner):
                acc ^= int(a[i, t]) & int(b[t, j])
            out[i, j] = acc
    return out


def test_rlc_zero_parity_case():
    seed = next(s for s in range(1000) if not rlc_new(4, 2, s).generator[:, 2:].any())
    code = rlc_new(4, 2, seed)
    assert np.array_equal(code.generator, np.array([[1, 0, 0, 0], [0, 1, 0, 0]]))
    assert not all_codewords(code)[:, 2:].any()


def test_rlc_generator_orthogonal_to_parity_check():
    code = rlc_new(8, 4, 7)
    assert not naive_gf2_product(code.generator, code.parity_check.T).any()
    assert gf2_rank(code.generator) == 4
    assert gf2_rank(code.parity_check) == 4


def test_rlc_benchmark_dimensions(rlc128):
    assert (rlc128.n, rlc128.k) == (128, 116)
    assert rlc128.parity_check.shape == (12, 128)


def test_rlc_deterministic():
    a, b = rlc_new(64, 50, 99), rlc_new(64, 50, 99)
    assert np.array_equal(a.generator, b.generator)
    assert not np.array_equal(a.generator, rlc_new(64, 50, 100).generator)


@pytest.mark.parametrize("n,k", [(4, 0), (4, 4), (4, 5), (0, 0)])
def test_rlc_rejects_bad_dimensions(n, k):
    with pytest.raises(ValueError):
        rlc_new(n, k, 1)


def test_crc_small_exhaustive():
    # x^3 + x + 1, one data bit: codewords 0000 and 1 011
    code = crc_new(4, 1, 0b1011)
    words = all_codewords(code)
    assert words.tolist() == [[0, 0, 0, 0], [1, 0, 1, 1]]
    assert all(is_codeword(code, w) for w in words)
    members = [w for w in itertools.product([0, 1], repeat=4) if is_codeword(code, np.array(w))]
    assert sorted(members) == [(0, 0, 0, 0), (1, 0, 1, 1)]


def test_crc_benchmark_dimensions():
    code = crc_new(128, 116)
    assert (code.n, code.k) == (128, 116)
    assert code.descriptor["polynomial"] == hex(DEFAULT_CRC12)


@pytest.mark.parametrize("make", [lambda: crc_new(128, 116), lambda: crc_new(16, 8, 0x107)])
def test_crc_detects_every_single_error(make, rng):
    code = make()
    c = encode(code, rng.integers(0, 2, code.k))
    flips = np.tile(c, (code.n, 1)) ^ np.eye(code.n, dtype=np.uint8)
    assert not is_codeword(code, flips).any()


def test_crc_membership_matches_polynomial_division():
    code = crc_new(12, 4, 0x107)
    words = np.array(list(itertools.product([0, 1], repeat=12)), dtype=np.uint8)
    via_h = is_codeword(code, words)
    via_div = np.array([crc_remainder(code, w) == 0 for w in words])
    assert np.array_equal(via_h, via_div)
    assert via_h.sum() == 2**4


def test_crc_accepts_coefficient_list_and_hex():
    a = crc_new(16, 8, [1, 0, 0, 0, 0, 0, 1, 1, 1])
    b = crc_new(16, 8, "0x107")
    assert np.array_equal(a.generator, b.generator)


@pytest.mark.parametrize("poly", [0x10F, 0x1F, 0x106])
def test_crc_rejects_bad_polynomial(poly):
    # degree 8 != 4, degree 4 != 8, and a zero constant term
    with pytest.raises(ValueError):
        crc_new(16, 8 if poly != 0x10F else 12, poly)


def test_encode_linearity_and_systematic(rlc84, rng):
    assert not encode(rlc84, np.zeros(4, np.uint8)).any()
    u = rng.integers(0, 2, (50, 4))
    c = encode(rlc84, u)
    assert np.array_equal(c[:, :4], u)
    assert not naive_gf2_product(rlc84.parity_check, c.T).any()


def test_encode_exhaustive_k12():
    code = rlc_new(24, 12, 3)
    assert is_codeword(code, all_codewords(code)).all()


def test_encode_length_mismatch(rlc84):
    with pytest.raises(ValueError):
        encode(rlc84, np.zeros(5, np.uint8))
    with pytest.raises(ValueError):
        is_codeword(rlc84, np.zeros(7, np.uint8))


def test_single_flips_fail_when_min_distance_at_least_two():
    code = next(c for c in (rlc_new(8, 4, s) for s in range(7, 100)) if all_codewords(c)[1:].sum(axis=1).min() >= 2)
    assert is_codeword(code, np.zeros(8, np.uint8))
    for c in all_codewords(code):
        for i in range(8):
            bad = c.copy()
            bad[i] ^= 1
            assert not is_codeword(code, bad)


def test_packed_syndrome_matches_matrix_product(rlc128, rng):
    words = rng.integers(0, 2, (40, 128)).astype(np.uint8)
    assert np.array_equal(syndrome(rlc128, words), (words.astype(int) @ rlc128.parity_check.T.astype(int)) % 2)


def test_column_syndromes_pack_parity_columns(rlc128):
    cols = rlc128.column_syndromes()
    assert cols.shape == (128, 1)
    for j in (0, 17, 127):
        expect = sum(int(rlc128.parity_check[r, j]) << r for r in range(12))
        assert int(cols[j, 0]) == expect


def test_linear_code_rejects_inconsistent_pair():
    G = np.array([[1, 0, 1]], dtype=np.uint8)
    H = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    with pytest.raises(ValueError, match="G H"):
        LinearCode(3, 1, G, H)


def test_full_space_has_no_checks():
    code = full_space(6)
    assert is_codeword(code, np.array([1, 0, 1, 1, 0, 1]))


@pytest.mark.parametrize(
    "cfg",
    [
        {"kind": "rlc", "n": 128, "k": 116, "seed": 5},
        {"kind": "crc", "n": 128, "k": 116, "polynomial": "0x180f"},
    ],
)
def test_descriptor_round_trip(cfg):
    code = code_from_config(cfg)
    assert code.to_config() == cfg
    assert np.array_equal(LinearCode.from_config(code.to_config()).generator, code.generator)


def test_descriptor_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        code_from_config({"kind": "rlc", "n": 8, "k": 4, "sed": 1})
    with pytest.raises(ValueError):
        code_from_config({"kind": "ldpc", "n": 8, "k": 4})
