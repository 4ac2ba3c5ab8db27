import random

import pytest

from crowdquery.rdf import (Dataset, NTriplesError, Triple,
                            blank, iri, literal, parse_ntriples, term_from_text,
                            term_to_text)

DB = "http://dbpedia.org/resource/"
PRODUCER = "http://dbpedia.org/property/producer"


def test_parse_single_line():
    d = parse_ntriples("<http://x/s> <http://x/p> <http://x/o> .")
    assert len(d) == 1
    assert Triple(iri("http://x/s"), iri("http://x/p"), iri("http://x/o")) in d


def test_parse_empty_input():
    assert len(parse_ntriples("")) == 0


def test_fixture_triple_count_matches_line_count(fixtures_dir, movies):
    text = (fixtures_dir / "figure2.nt").read_text(encoding="utf-8")
    expected = sum(1 for line in text.splitlines()
                   if line.strip() and not line.strip().startswith("#"))
    assert len(movies) == expected


def test_duplicate_lines_are_deduplicated():
    line = "<http://x/s> <http://x/p> <http://x/o> ."
    d = parse_ntriples(line + "\n" + line)
    assert len(d) == 1


def test_insert_idempotence():
    d = Dataset()
    t = Triple(iri("http://x/s"), iri("http://x/p"), literal("v"))
    d.add(t)
    d.add(t)
    assert len(d) == 1
    assert d.objects(iri("http://x/s"), "http://x/p") == [literal("v")]


def test_malformed_line_reports_line_number():
    with pytest.raises(NTriplesError) as exc:
        parse_ntriples("<http://x/s> <http://x/p> <http://x/o> .\n<http://x/a> nonsense .")
    assert exc.value.line_no == 2


def test_missing_dot_is_an_error():
    with pytest.raises(NTriplesError):
        parse_ntriples("<http://x/s> <http://x/p> <http://x/o>")


def test_literal_parsing_with_language_and_datatype():
    d = parse_ntriples(
        '<http://x/s> <http://x/p> "hola"@es .\n'
        '<http://x/s> <http://x/p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> .\n'
        '<http://x/s> <http://x/p> "say \\"hi\\"" .')
    objs = set(d.objects(iri("http://x/s"), "http://x/p"))
    assert literal("hola", lang="es") in objs
    assert literal("5", datatype="http://www.w3.org/2001/XMLSchema#integer") in objs
    assert literal('say "hi"') in objs


def test_blank_node_subject():
    d = parse_ntriples("_:b1 <http://x/p> <http://x/o> .")
    assert d.triples[0].subject == blank("b1")


def test_match_all_wildcards_returns_everything(movies):
    assert set(movies.match()) == set(movies.triples)


def test_match_interpreter_producers(movies):
    got = movies.match(iri(DB + "The_Interpreter"), iri(PRODUCER), None)
    assert len(got) == 3


def test_match_unknown_subject_is_empty(movies):
    assert movies.match(iri("http://x/nowhere"), None, None) == []


def test_classes_of_extended_fixture(movies_ext):
    assert movies_ext.classes_of(iri(DB + "The_Interpreter")) == {
        "http://schema.org/Movie", "http://dbpedia.org/ontology/Film"}
    assert movies_ext.classes_of(iri(DB + "Tower_Heist")) == {
        "http://schema.org/Movie", "http://dbpedia.org/ontology/Film"}


def test_classes_of_untyped_subject(movies):
    assert movies.classes_of(iri(DB + "Tim_Bevan")) == set()


def test_label_of_falls_back_to_local_name():
    d = Dataset()
    assert d.label_of(iri(DB + "Madrid")) == "Madrid"


def test_label_of_literal_is_its_lexical_form():
    assert Dataset().label_of(literal("1986")) == "1986"


def test_label_of_decodes_underscores_and_percent():
    d = Dataset()
    # local-name rule applied by hand: underscores to spaces, percent-decoded
    assert d.label_of(iri("http://x/Non-Stop_(film)")) == "Non-Stop (film)"
    assert d.label_of(iri("http://x/Caf%C3%A9")) == "Café"


def test_label_triple_wins_over_local_name():
    d = parse_ntriples(
        f'<{DB}Spain> <http://www.w3.org/2000/01/rdf-schema#label> "Kingdom of Spain" .')
    assert d.label_of(iri(DB + "Spain")) == "Kingdom of Spain"


def test_sp_index_agrees_with_match(movies):
    for t in movies.triples:
        assert len(movies.match(t.subject, t.predicate, None)) == \
            len(movies.objects(t.subject, t.predicate.value))


def test_constant_match_is_subset_of_wildcard_match():
    rng = random.Random(11)
    for _ in range(20):
        d = Dataset()
        for _ in range(rng.randint(1, 30)):
            d.add(Triple(iri(f"http://x/s{rng.randint(0, 5)}"),
                         iri(f"http://x/p{rng.randint(0, 3)}"),
                         iri(f"http://x/o{rng.randint(0, 5)}")))
        t = rng.choice(d.triples)
        wild = set(d.match(None, t.predicate, None))
        narrowed = set(d.match(t.subject, t.predicate, None))
        assert narrowed <= wild
        assert set(d.match(t.subject, t.predicate, t.object)) <= narrowed


def test_iri_rejects_whitespace():
    with pytest.raises(ValueError):
        iri("http://x/a b")
    with pytest.raises(ValueError):
        iri("")


def test_predicate_must_be_iri():
    with pytest.raises(ValueError):
        Triple(iri("http://x/s"), literal("p"), iri("http://x/o"))


def test_term_text_round_trip():
    for t in (iri("http://x/a"), blank("b7"), literal("plain"),
              literal('quo"te'), literal("back\\slash"),
              literal("5", datatype="http://www.w3.org/2001/XMLSchema#integer")):
        assert term_from_text(term_to_text(t)) == t
