import math

import numpy as np
import pytest

from jkcv.textfeat import (
    Corpus,
    build_vocabulary,
    encode_labels,
    read_delimited_corpus,
    read_directory_corpus,
    tokenize,
    vectorize,
)


def corpus(docs, labels):
    return Corpus(tuple(docs), np.array(labels))


class TestTokenize:
    def test_lowercase_and_split(self):
        assert tokenize("Hello, WORLD!  42x") == ["hello", "world", "42x"]

    def test_underscore_is_a_separator(self):
        assert tokenize("a_b") == ["a", "b"]

    def test_empty(self):
        assert tokenize("...!?") == []


class TestBuildVocabulary:
    def test_hand_computed_example(self):
        c = corpus(["a b", "a"], [0, 1])
        vocab = build_vocabulary(c, top_n=1)
        # score(a) = tf 2 * (ln(3/3)+1) = 2.0
        # score(b) = tf 1 * (ln(3/2)+1) ~= 1.405
        assert vocab.terms == ("a",)
        assert vocab.df == (2,)
        assert vocab.idf[0] == pytest.approx(math.log(3 / 3) + 1)

    def test_saturation_returns_all_terms(self):
        c = corpus(["x y", "y z"], [0, 1])
        with pytest.warns(UserWarning, match="distinct terms"):
            vocab = build_vocabulary(c, top_n=10)
        assert set(vocab.terms) == {"x", "y", "z"}
        # y appears twice, so it ranks first
        assert vocab.terms[0] == "y"

    def test_deterministic(self):
        c = corpus(["red green blue", "green blue", "blue"], [0, 1, 0])
        a = build_vocabulary(c, top_n=2)
        b = build_vocabulary(c, top_n=2)
        assert a == b

    def test_tie_breaks_lexicographically(self):
        # two terms with identical tf and df
        c = corpus(["beta alpha", "alpha beta"], [0, 1])
        vocab = build_vocabulary(c, top_n=2)
        assert vocab.terms == ("alpha", "beta")

    def test_top_n_validation(self):
        with pytest.raises(ValueError):
            build_vocabulary(corpus(["a"], [0, 1][:1] + []), top_n=0)


class TestVectorize:
    def test_counts(self):
        c = corpus(["dog dog dog", "cat", "bird"], [0, 1, 0])
        vocab = build_vocabulary(c, top_n=3)
        ds = vectorize(c, vocab)
        assert ds.n == 3 and ds.d == 3
        row = ds.features[0]
        assert row[vocab.terms.index("dog")] == 3.0

    def test_out_of_vocabulary_row_is_zero(self):
        c = corpus(["aaa bbb", "zzz"], [0, 1])
        vocab = build_vocabulary(corpus(["aaa bbb"], [0, 1][:1]), top_n=2)
        ds = vectorize(c, vocab)
        assert np.all(ds.features[1] == 0.0)

    def test_shape_contract(self):
        c = corpus(["u v w", "v w", "w"], [0, 1, 1])
        for top_n in (1, 2, 3, 5):
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                vocab = build_vocabulary(c, top_n=top_n)
            ds = vectorize(c, vocab)
            assert ds.d == min(top_n, 3)
            assert ds.n == 3

    def test_column_sums_match_brute_force_recount(self):
        docs = ["the cat sat", "the dog sat on the mat", "cat cat dog"]
        c = corpus(docs, [0, 1, 0])
        vocab = build_vocabulary(c, top_n=4)
        ds = vectorize(c, vocab)
        for j, term in enumerate(vocab.terms):
            total = sum(tokenize(doc).count(term) for doc in docs)
            assert ds.features[:, j].sum() == total

    def test_labels_pass_through(self):
        c = corpus(["p q", "q"], [1, 0])
        ds = vectorize(c, build_vocabulary(c, top_n=2))
        assert ds.labels.tolist() == [1, 0]


class TestCorpusValidation:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            Corpus(("a",), np.array([0, 1]))

    def test_missing_class(self):
        with pytest.raises(ValueError, match="at least one document"):
            Corpus(("a", "b"), np.array([0, 2]))


class TestIngestion:
    def test_encode_labels_numeric_sort(self):
        labels, names = encode_labels(["10", "2", "2", "10"])
        assert names == ("2", "10")
        assert labels.tolist() == [1, 0, 0, 1]

    def test_encode_labels_lexicographic(self):
        labels, names = encode_labels(["pos", "neg", "pos"])
        assert names == ("neg", "pos")
        assert labels.tolist() == [1, 0, 1]

    def test_delimited_file(self, tmp_path):
        p = tmp_path / "corpus.tsv"
        p.write_text("pos\tgreat movie\nneg\tterrible plot\npos\tloved it\n", encoding="utf-8")
        c = read_delimited_corpus(p)
        assert c.label_names == ("neg", "pos")
        assert c.labels.tolist() == [1, 0, 1]
        assert c.documents[0] == "great movie"

    def test_delimited_file_bad_columns(self, tmp_path):
        p = tmp_path / "bad.tsv"
        p.write_text("pos\ta\tb\n", encoding="utf-8")
        with pytest.raises(ValueError, match="expected 2 columns"):
            read_delimited_corpus(p)

    def test_directory_per_class(self, tmp_path):
        (tmp_path / "neg").mkdir()
        (tmp_path / "pos").mkdir()
        (tmp_path / "pos" / "a.txt").write_text("good film", encoding="utf-8")
        (tmp_path / "neg" / "b.txt").write_text("bad film", encoding="utf-8")
        (tmp_path / "neg" / "c.txt").write_text("awful", encoding="utf-8")
        c = read_directory_corpus(tmp_path)
        assert c.label_names == ("neg", "pos")
        assert c.labels.tolist() == [0, 0, 1]
        assert c.documents[2] == "good film"

    def test_utf8_documents(self, tmp_path):
        p = tmp_path / "c.tsv"
        p.write_text("pos\tสุดยอด génial 素晴らしい\nneg\tmeh\n", encoding="utf-8")
        c = read_delimited_corpus(p)
        assert "génial" in c.documents[0]
        assert "génial" in tokenize(c.documents[0])
