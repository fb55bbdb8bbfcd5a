import numpy as np
import pytest
from hypothesis import given, strategies as st

from embkit.subword import SubwordConfig, char_ngrams, constituent_rows, ngram_bucket
from oracles import naive_char_ngrams, naive_fnv1a32


class TestCharNgrams:
    def test_hand_enumeration(self):
        cfg = SubwordConfig(minn=2, maxn=3)
        assert char_ngrams("abc", cfg) == ["<a", "ab", "bc", "c>", "<ab", "abc", "bc>"]

    def test_whole_form_excluded(self):
        cfg = SubwordConfig(minn=2, maxn=7)
        assert char_ngrams("a", cfg) == ["<a", "a>"]

    def test_count_identity(self):
        for word in ("a", "ab", "abcd", "abcdefgh"):
            for minn in range(1, 5):
                for maxn in range(minn, 9):
                    cfg = SubwordConfig(minn=minn, maxn=maxn)
                    L = len(word)
                    expected = sum(L + 3 - n for n in range(minn, min(maxn, L + 2) + 1))
                    if minn <= L + 2 <= maxn:
                        expected -= 1
                    assert len(char_ngrams(word, cfg)) == expected

    def test_marker_chars_rejected(self):
        with pytest.raises(ValueError):
            char_ngrams("a<b", SubwordConfig())
        with pytest.raises(ValueError):
            char_ngrams("", SubwordConfig())

    def test_lengths_in_range(self):
        cfg = SubwordConfig(minn=3, maxn=5)
        for g in char_ngrams("ويندڙسا", cfg):
            assert 3 <= len(g) <= 5

    @given(
        st.text(alphabet="abcdوين", min_size=1, max_size=20),
        st.integers(1, 4),
        st.integers(0, 5),
    )
    def test_brute_force_oracle(self, word, minn, extra):
        maxn = minn + extra
        cfg = SubwordConfig(minn=minn, maxn=maxn)
        assert char_ngrams(word, cfg) == naive_char_ngrams(word, minn, maxn)


class TestNgramBucket:
    def test_deterministic(self):
        assert ngram_bucket("ويا", 1000) == ngram_bucket("ويا", 1000)

    def test_single_bucket(self):
        assert ngram_bucket("anything", 1) == 0

    def test_fnv1a_reference_vectors(self):
        # independent implementation over the raw 32-bit space
        for text in ("a", "ab", "foobar", "ويا", "<اچ"):
            assert ngram_bucket(text, 2**32) == naive_fnv1a32(text.encode("utf-8"))

    def test_known_fnv_values(self):
        assert ngram_bucket("a", 2**32) == 0xE40C292C
        assert ngram_bucket("foobar", 2**32) == 0xBF9CF968

    def test_rough_uniformity(self, rng):
        # sanity only: no bucket should swallow a large fraction
        n_buckets = 64
        grams = ["".join(chr(97 + int(c)) for c in rng.integers(0, 26, size=5))
                 for _ in range(4000)]
        counts = np.bincount([ngram_bucket(g, n_buckets) for g in grams], minlength=n_buckets)
        assert counts.max() < 4000 * 5 / n_buckets


class TestConstituentRows:
    def test_word_row_first_then_buckets(self):
        cfg = SubwordConfig(minn=2, maxn=3, n_buckets=50)
        rows = constituent_rows("ab", 7, 10, cfg)
        assert rows[0] == 7
        expected = [10 + ngram_bucket(g, 50) for g in char_ngrams("ab", cfg)]
        assert rows[1:] == expected

    def test_marker_word_falls_back_to_own_row(self):
        cfg = SubwordConfig(minn=2, maxn=3, n_buckets=50)
        assert constituent_rows("a<b", 3, 10, cfg) == [3]
