import numpy as np
import pytest

from conftest import all_codewords, map_posterior, pcm_of, random_tree_h
from qcldpc.construct import BaseMatrix, MaskMatrix, lift
from qcldpc.decoder import (
    BpDecoder,
    DecoderConfig,
    channel_llr,
    msa_decode,
    spa_decode,
)


def test_channel_llr_values():
    llr = channel_llr([0.0, 1.0, -0.5], sigma=1.0)
    assert llr.tolist() == [0.0, 2.0, -1.0]
    with pytest.raises(ValueError, match="sigma"):
        channel_llr([1.0], 0.0)


def test_channel_llr_puncturing():
    llr = channel_llr([3.0, 3.0], sigma=1.0, punctured=(1,))
    assert llr[0] == 6.0 and llr[1] == 0.0


def test_config_validation():
    with pytest.raises(ValueError, match="algorithm"):
        DecoderConfig(algorithm="bp")
    with pytest.raises(ValueError, match="alpha"):
        DecoderConfig(alpha=0.0)
    with pytest.raises(ValueError, match="max_iterations"):
        DecoderConfig(max_iterations=0)


def small_qc():
    return lift(BaseMatrix([[0, 1, 2], [2, 0, 1]]), MaskMatrix(np.ones((2, 3), int)), 5)


def test_allzero_high_snr_one_iteration():
    pcm = small_qc()
    res = spa_decode(pcm, np.full(pcm.n, 9.0))
    assert res.iterations == 1 and res.syndrome_ok and not res.bits.any()


def test_early_exit_word_satisfies_syndrome(rng):
    pcm = small_qc()
    h = pcm.to_dense()
    dec = BpDecoder(pcm)
    cfg = DecoderConfig(max_iterations=50)
    for _ in range(30):
        y = 1.0 + 0.9 * rng.standard_normal(pcm.n)
        res = dec.decode(channel_llr(y, 0.9), cfg)
        if res.syndrome_ok:
            assert not (h @ res.bits % 2).any()


def test_msa_check_rule_degree3():
    dec = BpDecoder(pcm_of(np.array([[1, 1, 1]], np.uint8)))
    out = dec._check_update_msa(np.array([[1.5, -2.0, 0.7]]), 30.0, 1.0)
    assert out[0].tolist() == [-0.7, 0.7, -1.5]


def test_msa_alpha_scales_first_iteration():
    dec = BpDecoder(pcm_of(np.array([[1, 1, 1, 1]], np.uint8)))
    m = np.array([[0.4, -1.0, 2.0, -0.3]])
    full = dec._check_update_msa(m, 30.0, 1.0)
    scaled = dec._check_update_msa(m, 30.0, 0.75)
    assert np.allclose(scaled, 0.75 * full)


def test_msa_magnitudes_dominate_spa(rng):
    dec = BpDecoder(pcm_of(np.ones((1, 6), np.uint8)))
    for _ in range(20):
        m = rng.normal(0, 3, (1, 6))
        spa = dec._check_update_spa(m, 30.0)
        msa = dec._check_update_msa(m, 30.0, 1.0)
        assert (np.abs(msa) >= np.abs(spa) - 1e-12).all()
        assert np.allclose(np.sign(msa), np.sign(spa))


def test_spa_equals_tree_map(rng):
    worst = 0.0
    for _ in range(40):
        h = random_tree_h(rng, int(rng.integers(3, 13)))
        llr = rng.uniform(-2.0, 2.0, h.shape[1])
        cfg = DecoderConfig(max_iterations=2 * sum(h.shape), early_stop=False)
        res = spa_decode(pcm_of(h), llr, cfg)
        worst = max(worst, np.abs(res.posterior - map_posterior(h, llr)).max())
    assert worst < 1e-9


def test_codeword_sign_flip_symmetry(rng):
    # flipping llr signs on a codeword support permutes decoder outputs by
    # that codeword: the message maps are odd in the llr sign
    pcm = small_qc()
    h = pcm.to_dense()
    words = all_codewords(h)
    cw = words[rng.integers(1, len(words))]
    flip = 1.0 - 2.0 * cw.astype(float)
    cfg = DecoderConfig(max_iterations=30)
    for _ in range(10):
        llr = rng.normal(1.0, 2.0, pcm.n)
        a = spa_decode(pcm, llr, cfg)
        b = spa_decode(pcm, llr * flip, cfg)
        assert (b.bits == (a.bits ^ cw)).all()
        assert b.iterations == a.iterations
        assert np.allclose(b.posterior, a.posterior * flip, atol=1e-9)


def test_msa_sign_flip_symmetry(rng):
    pcm = small_qc()
    words = all_codewords(pcm.to_dense())
    cw = words[1]
    flip = 1.0 - 2.0 * cw.astype(float)
    cfg = DecoderConfig(algorithm="msa", alpha=0.8, max_iterations=20)
    llr = rng.normal(1.0, 2.0, pcm.n)
    a = msa_decode(pcm, llr, cfg)
    b = msa_decode(pcm, llr * flip, cfg)
    assert (b.bits == (a.bits ^ cw)).all()


def test_decoder_rejects_wrong_llr_length():
    pcm = small_qc()
    with pytest.raises(ValueError, match="llr length"):
        spa_decode(pcm, np.zeros(pcm.n + 1))


def test_messages_saturate_no_nan(rng):
    pcm = small_qc()
    cfg = DecoderConfig(max_iterations=100, early_stop=False, llr_clip=30.0)
    llr = rng.normal(0, 500.0, pcm.n)  # extreme inputs
    res = spa_decode(pcm, llr, cfg)
    assert np.isfinite(res.posterior).all()
