from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spiderquery import ConceptualSchema, parse_schema, serialize_schema, validate_schema
from spiderquery.ingest import SchemaParseError, format_weight, parse_weight


def test_parse_example_document(example_text, example_schema):
    s = example_schema
    assert s.types == ("A", "B", "C", "D", "f", "g")
    assert s.rel_types == ("f", "g")
    assert s.obj_types == ("A", "B", "C", "D")
    assert s.roles == {"f": ("r", "s"), "g": ("t", "u")}
    assert s.player == {"r": "A", "s": "B", "t": "C", "u": "A"}
    assert s.spec == (("D", "B"),)
    assert s.poly == (("A", "C"), ("A", "g"))
    assert all(w == 1 for w in s.cweight.values())
    assert validate_schema(s) == []


def test_parse_empty_string():
    assert parse_schema("") == ConceptualSchema()


def test_unknown_player_reports_line():
    with pytest.raises(SchemaParseError) as exc:
        parse_schema("relationship f roles r:A")
    assert "unknown player type A" in str(exc.value)
    assert exc.value.line == 1


def test_unknown_player_line_among_others():
    text = "objecttype X\nrelationship f roles r:X q:A\n"
    with pytest.raises(SchemaParseError) as exc:
        parse_schema(text)
    assert "unknown player type A" in str(exc.value)
    assert exc.value.line == 2


def test_syntax_error_location():
    with pytest.raises(SchemaParseError) as exc:
        parse_schema("objecttype A\nnonsense B\n")
    assert exc.value.line == 2
    assert exc.value.column == 1
    assert "nonsense" in str(exc.value)


def test_duplicate_type_is_error():
    with pytest.raises(SchemaParseError) as exc:
        parse_schema("objecttype A\nobjecttype A\n")
    assert "duplicate" in str(exc.value)
    assert exc.value.line == 2


def test_duplicate_role_is_error():
    text = "objecttype A\nrelationship f roles r:A\nrelationship g roles r:A\n"
    with pytest.raises(SchemaParseError) as exc:
        parse_schema(text)
    assert "duplicate declaration of role r" in str(exc.value)


def test_duplicate_pair_is_error():
    with pytest.raises(SchemaParseError):
        parse_schema("objecttype A\nobjecttype B\nspec A B\nspec A B\n")


def test_comments_and_blank_lines():
    text = "# header\n\nobjecttype A  # trailing comment\n"
    s = parse_schema(text)
    assert s.types == ("A",)


def test_weight_clause():
    s = parse_schema("objecttype A weight 3\nobjecttype B weight 0.5\n")
    assert s.cweight["A"] == 3
    assert s.cweight["B"] == Fraction(1, 2)


def test_bad_weight_rejected():
    with pytest.raises(SchemaParseError):
        parse_schema("objecttype A weight -1\n")
    with pytest.raises(SchemaParseError):
        parse_schema("objecttype A weight abc\n")


def test_relationship_without_roles_rejected():
    with pytest.raises(SchemaParseError) as exc:
        parse_schema("relationship f\n")
    assert "roles" in str(exc.value)


def test_malformed_role_pair_rejected():
    with pytest.raises(SchemaParseError):
        parse_schema("objecttype A\nrelationship f roles rA\n")


def test_serialize_empty_schema():
    assert serialize_schema(ConceptualSchema()) == ""


def test_serialize_single_weighted_type():
    s = ConceptualSchema.build(obj_types=["A"], weights={"A": 3})
    assert serialize_schema(s) == "objecttype A weight 3\n"


def test_example_round_trip(example_schema):
    assert parse_schema(serialize_schema(example_schema)) == example_schema


def test_format_weight_forms():
    assert format_weight(Fraction(3)) == "3"
    assert format_weight(Fraction(1, 2)) == "0.5"
    assert format_weight(Fraction(3, 8)) == "0.375"
    assert format_weight(Fraction(1, 3)) == "1/3"
    assert parse_weight("0.375") == Fraction(3, 8)
    assert parse_weight("1/3") == Fraction(1, 3)


_name = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,5}", fullmatch=True).filter(
    lambda s: s not in ("spec", "poly")
)
_weight = st.fractions(min_value=0, max_value=50, max_denominator=24)


@st.composite
def schemas(draw) -> ConceptualSchema:
    n_obj = draw(st.integers(1, 4))
    n_rel = draw(st.integers(0, 3))
    arities = [draw(st.integers(1, 3)) for _ in range(n_rel)]
    n_roles = sum(arities)
    names = draw(st.lists(_name, min_size=n_obj + n_rel + n_roles,
                          max_size=n_obj + n_rel + n_roles, unique=True))
    obj = names[:n_obj]
    rel = names[n_obj:n_obj + n_rel]
    roles = names[n_obj + n_rel:]
    types = obj + rel

    relationships = {}
    k = 0
    for f, arity in zip(rel, arities):
        relationships[f] = [
            (roles[k + i], draw(st.sampled_from(types))) for i in range(arity)
        ]
        k += arity

    pair = st.tuples(st.sampled_from(obj), st.sampled_from(types))
    spec = draw(st.lists(pair, max_size=3, unique=True))
    poly = draw(st.lists(pair, max_size=3, unique=True))
    weights = {t: draw(_weight) for t in types}
    return ConceptualSchema.build(obj_types=obj, relationships=relationships,
                                  spec=spec, poly=poly, weights=weights)


@given(schemas())
@settings(max_examples=150)
def test_round_trip_on_random_schemas(schema):
    assert validate_schema(schema) == []
    assert parse_schema(serialize_schema(schema)) == schema


@given(st.text())
@settings(max_examples=400)
def test_parsing_is_total(text):
    try:
        schema = parse_schema(text)
    except SchemaParseError as err:
        assert err.line >= 1
        assert err.column >= 1
    else:
        assert validate_schema(schema) == []
