import pytest

from crowdquery.gateway import (NullGateway, ReplayGateway, SimCrowdConfig,
                                SimGateway, sim_answer)
from crowdquery.kb import MINUS, PLUS
from crowdquery.microtask import build_tasks, make_question
from crowdquery.rdf import Dataset, iri, parse_ntriples

DB = "http://dbpedia.org/resource/"
COUNTRY = "http://dbpedia.org/ontology/country"


def oracle_with_madrid() -> Dataset:
    return parse_ntriples(
        f"<{DB}Madrid> <{COUNTRY}> <{DB}Spain> .\n"
        f"<{DB}Spain> <http://www.w3.org/2000/01/rdf-schema#label> \"Spain\" .")


def test_noiseless_sim_answers_yes_with_gold_value():
    oracle = oracle_with_madrid()
    cfg = SimCrowdConfig(oracle=oracle, seed=1)
    question = make_question(iri(DB + "Madrid"), COUNTRY, oracle)
    judgments = sim_answer(cfg, question)
    assert len(judgments) == 3
    assert all(j.verdict == "yes" and j.value == "Spain" for j in judgments)


def test_sim_answers_no_when_oracle_lacks_the_fact():
    cfg = SimCrowdConfig(oracle=oracle_with_madrid(), seed=1)
    question = make_question(iri(DB + "Monaco"), COUNTRY, Dataset())
    assert all(j.verdict == "no" for j in sim_answer(cfg, question))


def test_sim_judgments_are_deterministic():
    cfg = SimCrowdConfig(oracle=oracle_with_madrid(), seed=5,
                         error_rate=0.3, not_sure_rate=0.2)
    question = make_question(iri(DB + "Madrid"), COUNTRY, Dataset())
    assert sim_answer(cfg, question) == sim_answer(cfg, question)
    different_seed = SimCrowdConfig(oracle=oracle_with_madrid(), seed=6,
                                    error_rate=0.3, not_sure_rate=0.2)
    # not a hard guarantee per-question, but the streams should not be equal
    qs = [make_question(iri(f"{DB}City{i}"), COUNTRY, Dataset()) for i in range(10)]
    assert [sim_answer(cfg, q) for q in qs] != [sim_answer(different_seed, q) for q in qs]


def test_sim_confidence_law_bounds():
    cfg = SimCrowdConfig(oracle=Dataset(), seed=3, confidence_law=(0.95, 0.2),
                         judgments_per_question=50)
    question = make_question(iri(DB + "Madrid"), COUNTRY, Dataset())
    for j in sim_answer(cfg, question):
        assert 0.0 <= j.confidence <= 1.0
        assert 1 <= j.familiarity <= 7


def test_sim_rate_budget_enforced():
    with pytest.raises(ValueError):
        SimCrowdConfig(oracle=Dataset(), error_rate=0.7, not_sure_rate=0.5)


def test_sim_gateway_collects_aggregated_answers():
    oracle = oracle_with_madrid()
    gateway = SimGateway(SimCrowdConfig(oracle=oracle, seed=2))
    tasks = build_tasks([(iri(DB + "Madrid"), COUNTRY, "c")], oracle)
    ids = gateway.submit(tasks)
    answers = gateway.collect(ids)
    assert len(answers) == 1
    question, answer = answers[0]
    assert answer.target_set == PLUS
    assert answer.judgment_count == 3


def test_null_gateway_never_answers():
    gateway = NullGateway()
    tasks = build_tasks([(iri(DB + "Madrid"), COUNTRY, "c")], Dataset())
    assert gateway.collect(gateway.submit(tasks)) == []


def test_replay_of_recorded_capitals(fixtures_dir):
    gateway = ReplayGateway(fixtures_dir / "capitals_replay.csv")
    cities = ["Chișinău", "Edinburgh", "Episkopi_Cantonment", "Gibraltar",
              "Helsinki", "Madrid", "Pristina", "Vatican_City", "Monaco"]
    tasks = build_tasks([(iri(DB + c), COUNTRY, "country") for c in cities],
                        Dataset())
    answers = gateway.collect(gateway.submit(tasks))
    tags = [a.target_set for _, a in answers]
    assert len(answers) == 9
    assert tags.count(PLUS) == 8
    assert tags.count(MINUS) == 1
    madrid = next(a for q, a in answers if q.subject == iri(DB + "Madrid"))
    assert madrid.object == iri(DB + "Spain")
    assert madrid.membership == pytest.approx(0.988)


def test_replay_with_empty_file_leaves_all_unanswered(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    gateway = ReplayGateway(empty)
    tasks = build_tasks([(iri(DB + "Madrid"), COUNTRY, "c")], Dataset())
    assert gateway.collect(gateway.submit(tasks)) == []


def test_replay_with_unrelated_keys_leaves_all_unanswered(fixtures_dir):
    gateway = ReplayGateway(fixtures_dir / "capitals_replay.csv")
    tasks = build_tasks([(iri(DB + "Atlantis"), COUNTRY, "c")], Dataset())
    assert gateway.collect(gateway.submit(tasks)) == []
