"""The trigram-hash embedder: determinism, norms, and cosine structure."""

import numpy as np
import pytest

from ebrguard import (
    DimensionMismatch,
    MalformedLine,
    Side,
    cosine,
    embed_document,
    embed_text,
    load_embeddings,
    save_embeddings,
)
from tests.test_corpus import make_doc


class TestEmbedText:
    def test_deterministic(self):
        a = embed_text("community gardening tips", Side.QUERY, 64)
        b = embed_text("community gardening tips", Side.QUERY, 64)
        np.testing.assert_array_equal(a, b)

    def test_unit_norm(self):
        for text in ("austin hiking club", "xyz", "a b c d e f"):
            for side in Side:
                v = embed_text(text, side, 64)
                assert abs(np.linalg.norm(v) - 1.0) <= 1e-6

    def test_empty_and_whitespace_map_to_e0(self):
        for text in ("", "   ", "\t\n"):
            v = embed_text(text, Side.DOC, 64)
            assert v[0] == 1.0 and np.count_nonzero(v) == 1

    def test_too_short_for_a_trigram_maps_to_e0(self):
        v = embed_text("ab", Side.QUERY, 64)
        assert v[0] == 1.0 and np.count_nonzero(v) == 1

    def test_case_insensitive(self):
        np.testing.assert_array_equal(
            embed_text("Hiking Club", Side.QUERY, 64),
            embed_text("hiking club", Side.QUERY, 64),
        )

    def test_sides_are_distinct_functions(self):
        q = embed_text("hiking club", Side.QUERY, 64)
        d = embed_text("hiking club", Side.DOC, 64)
        assert not np.array_equal(q, d)

    def test_shared_trigrams_force_cosine_ordering(self):
        q = embed_text("hiking club", Side.QUERY, 64)
        near = embed_text("hiking clubs", Side.DOC, 64)
        far = embed_text("quantum chess", Side.DOC, 64)
        assert cosine(q, near) > cosine(q, far)

    def test_dimension_floor(self):
        with pytest.raises(ValueError):
            embed_text("hello there", Side.QUERY, 4)

    def test_small_dimension_allowed(self):
        assert embed_text("hello there", Side.QUERY, 8).shape == (8,)


class TestEmbedDocument:
    def test_matches_concatenation_rule(self):
        doc = make_doc("d1", title="a", description="")
        np.testing.assert_array_equal(embed_document(doc, 64), embed_text("a ", Side.DOC, 64))
        doc2 = make_doc("d2", title="hiking club", description="weekly walks")
        np.testing.assert_array_equal(
            embed_document(doc2, 64),
            embed_text("hiking club weekly walks", Side.DOC, 64),
        )

    def test_deterministic(self):
        doc = make_doc("d1")
        np.testing.assert_array_equal(embed_document(doc, 64), embed_document(doc, 64))

    def test_disjoint_trigrams_near_orthogonal(self):
        a = embed_document(make_doc("d1", title="maple syrup", description=""), 64)
        b = embed_document(make_doc("d2", title="quartz dwell", description=""), 64)
        assert abs(cosine(a, b)) <= 0.2


class TestEmbeddingFiles:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "emb.tsv"
        path.write_text("")
        assert load_embeddings(path) == {}

    def test_renormalized_on_load(self, tmp_path):
        path = tmp_path / "emb.tsv"
        path.write_text("d1\t0,0,3,4\n")
        loaded = load_embeddings(path)
        np.testing.assert_allclose(loaded["d1"], [0.0, 0.0, 0.6, 0.8], atol=1e-12)

    def test_dimension_mismatch(self, tmp_path):
        path = tmp_path / "emb.tsv"
        path.write_text("d1\t1,0,0\nd2\t1,0\n")
        with pytest.raises(DimensionMismatch):
            load_embeddings(path)

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "emb.tsv"
        path.write_text("d1 1,0,0\n")
        with pytest.raises(MalformedLine):
            load_embeddings(path)
        path.write_text("d1\t1,zero,0\n")
        with pytest.raises(MalformedLine):
            load_embeddings(path)

    def test_round_trip(self, tmp_path):
        path = tmp_path / "emb.tsv"
        vectors = {
            "d1": embed_text("hiking club", Side.DOC, 16),
            "d2": embed_text("jazz circle", Side.DOC, 16),
        }
        save_embeddings(vectors, path)
        loaded = load_embeddings(path)
        assert set(loaded) == {"d1", "d2"}
        for doc_id in vectors:
            np.testing.assert_allclose(loaded[doc_id], vectors[doc_id], atol=1e-12)
