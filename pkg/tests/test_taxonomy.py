import json
import math

import pytest
from hypothesis import given, strategies as st

from autofl.taxonomy import (
    TaxonomyError,
    build_index,
    load_taxonomy,
    serialize_taxonomy,
)
from conftest import toy_taxonomy_doc


def test_load_minimal_taxonomy(toy_taxonomy):
    assert toy_taxonomy.m == 2
    assert [l.name for l in toy_taxonomy.labels] == ["ui", "image"]
    assert toy_taxonomy.labels[0].keywords == {"button": 1.0, "widget": 1.0}


def test_load_yaml_format():
    text = "labels:\n  - {id: 0, name: ui, keywords: {button: 1.0}}\n  - {id: 1, name: image, keywords: {pixel: 2.5}}\n"
    t = load_taxonomy(text.encode(), "yaml")
    assert t.m == 2
    assert t.labels[1].keywords["pixel"] == 2.5


def test_keywords_lowercased_on_load():
    doc = toy_taxonomy_doc()
    doc["labels"][0]["keywords"] = {"Button": 1.0}
    t = load_taxonomy(json.dumps(doc), "json")
    assert "button" in t.labels[0].keywords


def test_duplicate_name_rejected():
    doc = toy_taxonomy_doc()
    doc["labels"][1]["name"] = "UI"
    with pytest.raises(TaxonomyError, match="duplicate name"):
        load_taxonomy(json.dumps(doc), "json")


def test_duplicate_id_rejected():
    doc = toy_taxonomy_doc()
    doc["labels"][1]["id"] = 0
    with pytest.raises(TaxonomyError, match="duplicate id"):
        load_taxonomy(json.dumps(doc), "json")


def test_non_contiguous_ids_rejected():
    doc = toy_taxonomy_doc()
    doc["labels"][1]["id"] = 5
    with pytest.raises(TaxonomyError, match="contiguous"):
        load_taxonomy(json.dumps(doc), "json")


def test_non_positive_weight_rejected():
    doc = toy_taxonomy_doc()
    doc["labels"][0]["keywords"]["button"] = 0.0
    with pytest.raises(TaxonomyError, match="button"):
        load_taxonomy(json.dumps(doc), "json")


def test_single_label_rejected():
    doc = {"labels": [{"id": 0, "name": "only", "keywords": {}}]}
    with pytest.raises(TaxonomyError, match="at least 2"):
        load_taxonomy(json.dumps(doc), "json")


def test_empty_and_malformed_documents():
    with pytest.raises(TaxonomyError):
        load_taxonomy(b"{}", "json")
    with pytest.raises(TaxonomyError, match="malformed"):
        load_taxonomy(b"{not json", "json")


def test_keywordless_label_allowed():
    doc = toy_taxonomy_doc()
    del doc["labels"][1]["keywords"]
    t = load_taxonomy(json.dumps(doc), "json")
    assert t.labels[1].keywords == {}


def test_serialize_round_trip_order_insensitive(toy_taxonomy):
    doc = json.loads(serialize_taxonomy(toy_taxonomy))
    doc["labels"].reverse()
    assert load_taxonomy(json.dumps(doc), "json") == toy_taxonomy


def test_index_idf_values(toy_taxonomy):
    idx = build_index(toy_taxonomy)
    # "button" appears in 1 of 2 labels
    assert idx.idf["button"] == pytest.approx(1 + math.log(2), abs=1e-12)
    assert "data" not in idx.idf  # term absent from all labels: lookup miss


def test_index_idf_df_equals_m():
    doc = toy_taxonomy_doc()
    doc["labels"][1]["keywords"]["button"] = 1.0
    t = load_taxonomy(json.dumps(doc), "json")
    assert build_index(t).idf["button"] == 1.0


def test_index_postings_cover_union(toy_taxonomy):
    idx = build_index(toy_taxonomy)
    assert set(idx.postings) == {"button", "widget", "pixel"}
    assert idx.postings["button"] == ((0, 1.0),)


@st.composite
def taxonomies(draw):
    m = draw(st.integers(min_value=2, max_value=8))
    vocab = [f"kw{i}" for i in range(10)]
    labels = []
    for i in range(m):
        terms = draw(st.lists(st.sampled_from(vocab), unique=True, max_size=5))
        labels.append(
            {
                "id": i,
                "name": f"label{i}",
                "keywords": {t: draw(st.floats(0.1, 10.0)) for t in terms},
            }
        )
    return {"labels": labels}


@given(taxonomies())
def test_idf_decreases_with_df(doc):
    t = load_taxonomy(json.dumps(doc), "json")
    idx = build_index(t)
    df = {term: len(entries) for term, entries in idx.postings.items()}
    by_df = sorted(idx.idf, key=lambda term: df[term])
    for earlier, later in zip(by_df, by_df[1:]):
        if df[earlier] < df[later]:
            assert idx.idf[earlier] > idx.idf[later]
    for term, value in idx.idf.items():
        assert 1.0 <= value <= 1.0 + math.log(t.m) + 1e-12


@given(taxonomies())
def test_build_index_deterministic(doc):
    t = load_taxonomy(json.dumps(doc), "json")
    assert build_index(t) == build_index(t)
