import json
import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.distance import jensenshannon

from autofl.annotate import (
    AnnotationVector,
    AnnotatorConfig,
    annotate_file,
    divergence_from_uniform,
    ensemble,
    filter_by_divergence,
    from_scores,
    js_distance,
    lf_keyword_tfidf,
    lf_similarity,
    ranked_labels,
    transform,
    unannotated,
    uniform,
)
from autofl.extract import TermBag, term_bag
from autofl.taxonomy import build_index, load_taxonomy
from conftest import toy_taxonomy_doc


# ---------------------------------------------------------------------------
# brute-force oracles, independent of the implementation under test

def oracle_keyword_scores(bag, taxonomy):
    """Naive double loop over terms x labels."""
    m = taxonomy.m
    df = {}
    for label in taxonomy.labels:
        for term in label.keywords:
            df[term] = df.get(term, 0) + 1
    scores = [0.0] * m
    for term, tf in bag.counts.items():
        for label in taxonomy.labels:
            if term in label.keywords:
                idf = 1 + math.log(m / df[term])
                scores[label.id] += tf * idf * label.keywords[term]
    return scores


def oracle_similarity_scores(bag, taxonomy):
    """Cosine via explicit vectors over the union vocabulary."""
    vocab = sorted(set(bag.counts) | {t for l in taxonomy.labels for t in l.keywords})
    bag_vec = [bag.counts.get(t, 0.0) for t in vocab]
    scores = []
    for label in taxonomy.labels:
        label_vec = [label.keywords.get(t, 0.0) for t in vocab]
        dot = sum(a * b for a, b in zip(bag_vec, label_vec))
        na = math.sqrt(sum(a * a for a in bag_vec))
        nb = math.sqrt(sum(b * b for b in label_vec))
        scores.append(dot / (na * nb) if na > 0 and nb > 0 else 0.0)
    return scores


def normalize(scores):
    total = sum(scores)
    return [s / total for s in scores] if total > 0 else None


@pytest.fixture
def toy(toy_taxonomy):
    return toy_taxonomy, build_index(toy_taxonomy)


class TestKeywordLF:
    def test_hand_computed_example(self, toy):
        t, idx = toy
        v = lf_keyword_tfidf(TermBag({"button": 2, "pixel": 1}), idx, t)
        assert v.probs == pytest.approx((2 / 3, 1 / 3), abs=1e-12)
        assert v.probs == pytest.approx(
            normalize(oracle_keyword_scores(TermBag({"button": 2, "pixel": 1}), t))
        )

    def test_no_hits_abstains(self, toy):
        t, idx = toy
        assert not lf_keyword_tfidf(TermBag({"zebra": 3}), idx, t).annotated

    def test_single_label_mass(self, toy):
        t, idx = toy
        v = lf_keyword_tfidf(TermBag({"button": 1, "widget": 1}), idx, t)
        assert v.probs == pytest.approx((1.0, 0.0))

    def test_scale_invariance(self, toy):
        t, idx = toy
        bag1 = TermBag({"button": 2, "pixel": 1})
        bag5 = TermBag({"button": 10, "pixel": 5})
        assert lf_keyword_tfidf(bag1, idx, t).probs == pytest.approx(
            lf_keyword_tfidf(bag5, idx, t).probs, abs=1e-12
        )


class TestSimilarityLF:
    def test_hand_computed_example(self, toy):
        t, _ = toy
        v = lf_similarity(TermBag({"button": 2, "pixel": 1}), t)
        assert v.probs == pytest.approx((0.5858, 0.4142), abs=1e-4)
        assert v.probs == pytest.approx(
            normalize(oracle_similarity_scores(TermBag({"button": 2, "pixel": 1}), t))
        )

    def test_disjoint_abstains(self, toy):
        t, _ = toy
        assert not lf_similarity(TermBag({"zebra": 1}), t).annotated

    def test_self_similarity(self, toy):
        t, _ = toy
        v = lf_similarity(TermBag({"button": 1, "widget": 1}), t)
        assert v.probs[0] == pytest.approx(1.0)


class TestJsDistance:
    def test_identity(self):
        assert js_distance((0.5, 0.5), (0.5, 0.5)) == 0.0

    def test_disjoint_support_is_one(self):
        assert js_distance((1.0, 0.0), (0.0, 1.0)) == pytest.approx(1.0)

    def test_closed_form_example(self):
        # JSD((1,0),(1/2,1/2)) = 0.5*log2(4/3) + 0.25*log2(4/3) ... = 0.31128
        assert js_distance((1.0, 0.0), (0.5, 0.5)) == pytest.approx(0.5579, abs=1e-4)

    def test_matches_scipy_oracle(self):
        assert js_distance((0.2, 0.3, 0.5), (0.4, 0.4, 0.2)) == pytest.approx(
            float(jensenshannon([0.2, 0.3, 0.5], [0.4, 0.4, 0.2], base=2)), abs=1e-12
        )

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            js_distance((1.0,), (0.5, 0.5))

    def test_non_distribution_rejected(self):
        with pytest.raises(ValueError, match="probability"):
            js_distance((0.9, 0.9), (0.5, 0.5))

    @given(
        st.integers(2, 10).flatmap(
            lambda m: st.tuples(
                st.lists(st.floats(0.01, 1), min_size=m, max_size=m),
                st.lists(st.floats(0.01, 1), min_size=m, max_size=m),
            )
        )
    )
    def test_symmetric_and_bounded(self, pq):
        p, q = (normalize(x) for x in pq)
        d_pq, d_qp = js_distance(p, q), js_distance(q, p)
        assert d_pq == pytest.approx(d_qp, abs=1e-12)
        assert 0.0 <= d_pq <= 1.0


class TestFilter:
    def test_uniform_filtered(self):
        v = AnnotationVector(probs=(0.25,) * 4, status="annotated")
        assert not filter_by_divergence(v, 0.01).annotated

    def test_one_hot_survives(self):
        v = AnnotationVector(probs=(1.0, 0.0), status="annotated")
        assert filter_by_divergence(v, 0.1) == v

    def test_near_uniform_filtered_at_03(self):
        # distance from uniform computed by the scipy oracle decides the outcome
        v = AnnotationVector(probs=(0.75, 0.25), status="annotated")
        d = float(jensenshannon([0.75, 0.25], [0.5, 0.5], base=2))
        assert d < 0.3
        assert not filter_by_divergence(v, 0.3).annotated
        assert divergence_from_uniform(v) == pytest.approx(d, abs=1e-12)

    def test_unannotated_passes_through(self):
        v = unannotated(3)
        assert filter_by_divergence(v, 0.9) is v

    def test_threshold_monotonicity(self):
        vectors = [
            from_scores([1.0, x, 0.2]) for x in (0.1, 0.4, 0.7, 0.9, 1.0)
        ]
        for d1, d2 in [(0.0, 0.2), (0.2, 0.5), (0.1, 0.9)]:
            kept1 = {i for i, v in enumerate(vectors) if filter_by_divergence(v, d1).annotated}
            kept2 = {i for i, v in enumerate(vectors) if filter_by_divergence(v, d2).annotated}
            assert kept2 <= kept1


class TestTransform:
    def test_argmax(self):
        v = from_scores([0.1, 0.7, 0.2])
        assert transform(v, "argmax").probs == (0.0, 1.0, 0.0)

    def test_argmax_tie_lowest_id(self):
        v = from_scores([0.4, 0.4, 0.2])
        assert transform(v, "argmax").probs == (1.0, 0.0, 0.0)

    def test_top_k_renormalizes(self):
        v = from_scores([0.5, 0.3, 0.2])
        assert transform(v, "top_k", k=2).probs == pytest.approx((0.625, 0.375, 0.0))

    def test_threshold_mode(self):
        v = from_scores([0.5, 0.3, 0.2])
        assert transform(v, "threshold", p_min=0.25).probs == pytest.approx((0.625, 0.375, 0.0))

    def test_threshold_zeroing_everything_abstains(self):
        v = from_scores([0.4, 0.3, 0.3])
        assert not transform(v, "threshold", p_min=0.5).annotated

    def test_unannotated_passes_through(self):
        v = unannotated(3)
        assert transform(v, "argmax") is v

    @given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8))
    def test_argmax_preserves_argmax(self, scores):
        v = from_scores(scores)
        out = transform(v, "argmax")
        assert out.probs.index(1.0) == min(
            i for i, p in enumerate(v.probs) if p == max(v.probs)
        )


class TestEnsemble:
    def a(self, *probs):
        return AnnotationVector(probs=tuple(probs), status="annotated")

    def test_average(self):
        out = ensemble([self.a(0.8, 0.2), self.a(0.4, 0.6)], "average")
        assert out.probs == pytest.approx((0.6, 0.4))

    def test_vote(self):
        out = ensemble([self.a(0.8, 0.2), self.a(0.4, 0.6)], "vote")
        assert out.probs == pytest.approx((0.5, 0.5))

    def test_abstention_excluded(self):
        out = ensemble([self.a(0.8, 0.2), unannotated(2)], "average")
        assert out.probs == pytest.approx((0.8, 0.2))

    def test_all_abstain(self):
        assert not ensemble([unannotated(2), unannotated(2)], "average").annotated

    def test_identical_vectors_average_is_identity(self):
        v = self.a(0.3, 0.7)
        assert ensemble([v, v, v], "average").probs == pytest.approx(v.probs)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ensemble([self.a(1.0, 0.0), unannotated(3)], "average")


class TestAnnotateFile:
    def cfg(self, **kw):
        defaults = dict(name="kw", kind="keyword_tfidf", filter_threshold=0.0, transform="argmax")
        defaults.update(kw)
        return AnnotatorConfig(**defaults)

    def test_singleton_ensemble_identity(self, toy):
        t, idx = toy
        bag = TermBag({"button": 2, "pixel": 1})
        ann = annotate_file(bag, [self.cfg()], "average", t, idx)
        assert ann.ensemble == ann.per_annotator["kw"]
        assert ann.top_labels[0][0] == 0
        assert ann.jsd is not None

    def test_all_abstain(self, toy):
        t, idx = toy
        ann = annotate_file(TermBag({"zebra": 1}), [self.cfg()], "average", t, idx)
        assert not ann.ensemble.annotated
        assert ann.top_labels == ()
        assert ann.jsd is None

    def test_end_to_end_hand_trace(self, toy):
        t, idx = toy
        bag = term_bag("class ImageButton { ButtonWidget look; int pixelCount; }", "java")
        cfgs = [self.cfg(filter_threshold=0.1), self.cfg(name="sim", kind="similarity", filter_threshold=0.1)]
        ann = annotate_file(bag, cfgs, "average", t, idx)
        # "button" x2 and "widget" hit ui, "pixel" hits image: ui dominates
        # both annotators, survives the divergence filter, and wins argmax.
        assert ann.ensemble.annotated
        assert ann.top_labels[0][0] == 0

    def test_duplicate_annotator_names_rejected(self, toy):
        t, idx = toy
        with pytest.raises(ValueError, match="unique"):
            annotate_file(TermBag({"button": 1}), [self.cfg(), self.cfg()], "average", t, idx)


@st.composite
def random_bags(draw):
    vocab = ["button", "widget", "pixel", "zebra", "canvas"]
    terms = draw(st.lists(st.sampled_from(vocab), unique=True, min_size=1, max_size=5))
    return TermBag({t: draw(st.integers(1, 20)) for t in terms})


@given(random_bags())
@settings(max_examples=50)
def test_annotated_vectors_normalized(bag):
    t = load_taxonomy(json.dumps(toy_taxonomy_doc()), "json")
    idx = build_index(t)
    for v in (lf_keyword_tfidf(bag, idx, t), lf_similarity(bag, t)):
        if v.annotated:
            assert sum(v.probs) == pytest.approx(1.0, abs=1e-9)
            assert all(p >= 0 for p in v.probs)


def test_ranked_labels_tie_break():
    v = AnnotationVector(probs=(0.25, 0.5, 0.25, 0.0), status="annotated")
    assert ranked_labels(v) == ((1, 0.5), (0, 0.25), (2, 0.25))


def test_uniform_helper():
    assert uniform(4) == (0.25, 0.25, 0.25, 0.25)
