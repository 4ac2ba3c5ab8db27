import random

import pytest

from crowdquery.kb import MINUS, PLUS, TILDE, CrowdKB, is_existential
from crowdquery.microtask import (AggregationError, Judgment,
                                  aggregate_judgments, build_tasks, fold_into_kb,
                                  make_question, normalized_familiarity,
                                  resolve_value)
from crowdquery.rdf import Dataset, iri, literal, parse_ntriples

DB = "http://dbpedia.org/resource/"
COUNTRY = "http://dbpedia.org/ontology/country"


def judgment(verdict="yes", value="Spain", confidence=1.0, familiarity=7,
             question_id="q0"):
    return Judgment(question_id=question_id, verdict=verdict,
                    value=value if verdict == "yes" else None,
                    confidence=confidence, familiarity=familiarity)


def test_madrid_question_texts():
    d = Dataset()
    tasks = build_tasks([(iri(DB + "Madrid"), COUNTRY, "country")], d)
    assert len(tasks) == 1
    q = tasks[0].questions[0]
    assert q.existence_text == "Does Madrid have a country?"
    assert q.value_text == "What is the country of Madrid?"


def test_five_questions_pack_into_two_tasks():
    d = Dataset()
    triples = [(iri(f"http://x/s{i}"), "http://x/p", "o") for i in range(5)]
    tasks = build_tasks(triples, d, max_per_task=4)
    assert [len(t.questions) for t in tasks] == [4, 1]


def test_no_triples_no_tasks():
    assert build_tasks([], Dataset()) == []


def test_task_count_is_ceil_n_over_max():
    d = Dataset()
    rng = random.Random(2)
    for _ in range(30):
        n = rng.randint(0, 17)
        per = rng.randint(1, 4)
        triples = [(iri(f"http://x/s{i}"), "http://x/p", "o") for i in range(n)]
        assert len(build_tasks(triples, d, per)) == -(-n // per)


def test_pack_size_is_clamped_to_four():
    d = Dataset()
    triples = [(iri(f"http://x/s{i}"), "http://x/p", "o") for i in range(6)]
    assert [len(t.questions) for t in build_tasks(triples, d, 9)] == [4, 2]


def test_question_id_is_stable():
    d = Dataset()
    a = make_question(iri(DB + "Madrid"), COUNTRY, d)
    b = make_question(iri(DB + "Madrid"), COUNTRY, d)
    assert a.id == b.id


def test_yes_judgment_requires_value():
    with pytest.raises(ValueError):
        Judgment(question_id="q0", verdict="yes", value="  ")


def test_familiarity_scale_enforced():
    with pytest.raises(ValueError):
        Judgment(question_id="q0", verdict="no", familiarity=0)


def test_normalized_familiarity_endpoints():
    assert normalized_familiarity(1) == 0.0
    assert normalized_familiarity(7) == 1.0
    assert normalized_familiarity(4) == pytest.approx(0.5)


def test_aggregate_unanimous_yes_is_maximal():
    answer = aggregate_judgments([judgment(), judgment(), judgment()])
    assert answer.target_set == PLUS
    assert answer.object == literal("Spain")
    assert answer.membership == pytest.approx(1.0)
    assert answer.judgment_count == 3


def test_aggregate_no_majority_membership():
    # confidence average 0.833 and normalized familiarity average 0.476
    # combine to (0.833 + 0.476) / 2 = 0.6545
    js = [Judgment("q0", "no", None, confidence=0.833, familiarity=f)
          for f in (4, 4, 4)]
    answer = aggregate_judgments(js)
    got = answer.membership
    expected = (0.833 + (3 / 6)) / 2
    assert got == pytest.approx(expected, abs=1e-12)
    assert answer.target_set == MINUS
    assert is_existential(answer.object)


def test_aggregate_below_quota_is_an_error():
    with pytest.raises(AggregationError):
        aggregate_judgments([judgment(), judgment()], quota=3)


def test_aggregate_three_way_tie_is_an_error():
    js = [judgment("yes"), judgment("no", None), judgment("not_sure", None)]
    with pytest.raises(AggregationError, match="tie"):
        aggregate_judgments(js)


def test_two_way_tie_prefers_yes_then_no():
    js = [judgment("yes"), judgment("yes"),
          judgment("no", None), judgment("no", None)]
    assert aggregate_judgments(js, quota=3).target_set == PLUS
    js = [judgment("no", None), judgment("no", None),
          judgment("not_sure", None), judgment("not_sure", None)]
    assert aggregate_judgments(js, quota=3).target_set == MINUS


def test_aggregation_is_permutation_invariant():
    rng = random.Random(13)
    js = [judgment("yes", "Spain", 0.9, 6), judgment("yes", "France", 0.7, 3),
          judgment("yes", "Spain", 0.8, 5), judgment("no", None, 0.6, 2)]
    reference = aggregate_judgments(js, quota=3)
    for _ in range(10):
        shuffled = js[:]
        rng.shuffle(shuffled)
        assert aggregate_judgments(shuffled, quota=3) == reference


def test_value_plurality_breaks_ties_lexicographically():
    js = [judgment("yes", "Aruba"), judgment("yes", "Zambia"), judgment("yes", "Aruba"),
          judgment("yes", "Zambia")]
    assert aggregate_judgments(js, quota=3).object == literal("Aruba")


def test_mixed_question_ids_rejected():
    with pytest.raises(AggregationError):
        aggregate_judgments([judgment(), judgment(), judgment(question_id="q9")])


def test_resolution_prefers_label_over_local_name():
    d = parse_ntriples(
        f'<http://x/ES> <http://www.w3.org/2000/01/rdf-schema#label> "Spain" .\n'
        f'<{DB}Spain> <http://x/p> <http://x/o> .')
    assert resolve_value("Spain", d) == iri("http://x/ES")


def test_resolution_matches_humanized_local_name():
    d = parse_ntriples(f"<{DB}Brian_Grazer> <http://x/p> <http://x/o> .")
    assert resolve_value("Brian Grazer", d) == iri(DB + "Brian_Grazer")
    assert resolve_value("Brian_Grazer", d) == iri(DB + "Brian_Grazer")


def test_resolution_falls_back_to_literal():
    assert resolve_value("unheard of", Dataset()) == literal("unheard of")


def test_fold_yes_answer_resolves_to_iri(capitals):
    kb = CrowdKB()
    question = make_question(iri(DB + "Madrid"), COUNTRY, capitals)
    answer = aggregate_judgments([judgment(), judgment(), judgment()])
    quad = fold_into_kb(answer, question, kb, capitals)
    assert quad.object == iri(DB + "Spain")
    assert kb.quads(PLUS, iri(DB + "Madrid"), COUNTRY)[0].object == iri(DB + "Spain")


def test_fold_no_answer_inserts_existential(capitals):
    kb = CrowdKB()
    question = make_question(iri(DB + "Monaco"), COUNTRY, capitals)
    js = [judgment("no", None), judgment("no", None), judgment("no", None)]
    fold_into_kb(aggregate_judgments(js), question, kb, capitals)
    quads = kb.quads(MINUS, iri(DB + "Monaco"), COUNTRY)
    assert len(quads) == 1 and is_existential(quads[0].object)


def test_fold_not_sure_answer_lands_in_tilde(movies):
    kb = CrowdKB()
    question = make_question(iri(DB + "Non-Stop_(film)"),
                             "http://dbpedia.org/property/producer", movies)
    js = [judgment("not_sure", None, 0.97, 7)] * 3
    fold_into_kb(aggregate_judgments(js), question, kb, movies)
    assert kb.size(TILDE) == 1
