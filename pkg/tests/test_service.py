from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from spiderquery import build_graph, parse_schema, spider_query
from spiderquery.engine import tree_doc
from spiderquery.service import Store, canonical_json, create_app, replay_log


@pytest.fixture()
def store(tmp_path):
    return Store(tmp_path / "data")


@pytest.fixture()
def client(store):
    return TestClient(create_app(store))


def upload_example(client, example_text) -> str:
    r = client.post("/schemas", content=example_text,
                    headers={"content-type": "text/plain"})
    assert r.status_code == 201, r.text
    body = r.json()
    assert body["violations"] == []
    return body["id"]


def test_create_schema_and_fetch(client, example_text):
    schema_id = upload_example(client, example_text)
    r = client.get(f"/schemas/{schema_id}")
    assert r.status_code == 200
    assert r.text == example_text

    r = client.get("/schemas")
    listing = r.json()
    assert [s["id"] for s in listing] == [schema_id]
    assert listing[0]["obj_types"] == ["A", "B", "C", "D"]


def test_create_schema_malformed_line(client):
    r = client.post("/schemas", content="objecttype A\nbogus line\n",
                    headers={"content-type": "text/plain"})
    assert r.status_code == 400
    violations = r.json()["violations"]
    assert violations[0]["line"] == 2


def test_create_schema_duplicate_type(client):
    r = client.post("/schemas", content="objecttype A\nobjecttype A\n",
                    headers={"content-type": "text/plain"})
    assert r.status_code == 400
    assert "duplicate" in r.json()["violations"][0]["message"]
    assert "A" in r.json()["violations"][0]["message"]


def test_schema_graph_endpoint(client, example_text, example_schema):
    schema_id = upload_example(client, example_text)
    r = client.get(f"/schemas/{schema_id}/graph")
    assert r.status_code == 200
    assert r.json() == build_graph(example_schema).to_doc()


def test_unknown_schema_404(client):
    assert client.get("/schemas/nope").status_code == 404
    assert client.get("/schemas/nope/graph").status_code == 404
    r = client.post("/sessions", json={"schema_id": "nope", "root_type": "B"})
    assert r.status_code == 404


def test_create_session_matches_engine(client, example_text, example_schema,
                                        example_graph):
    schema_id = upload_example(client, example_text)
    r = client.post("/sessions", json={"schema_id": schema_id, "root_type": "B"})
    assert r.status_code == 201
    doc = r.json()
    expected = spider_query(example_graph, example_schema, "B")
    assert doc["tree"] == tree_doc(expected, example_schema)
    assert doc["root_type"] == "B"
    assert doc["log"][0]["op"] == "spider"
    assert doc["expression"].startswith("[D1: D o B, f1: ")

    r2 = client.get(f"/sessions/{doc['id']}")
    assert r2.json() == doc


def test_create_session_unknown_root(client, example_text):
    schema_id = upload_example(client, example_text)
    r = client.post("/sessions", json={"schema_id": schema_id, "root_type": "Z"})
    assert r.status_code == 400
    assert "unknown root type Z" in r.json()["detail"]


def test_isolated_root_session(client):
    r = client.post("/schemas", content="objecttype A\n",
                    headers={"content-type": "text/plain"})
    schema_id = r.json()["id"]
    r = client.post("/sessions", json={"schema_id": schema_id, "root_type": "A"})
    doc = r.json()
    assert doc["expression"] == "A"
    assert len(doc["tree"]["nodes"]) == 1


def test_prune_and_respider_ops(client, example_text, example_schema, example_graph):
    schema_id = upload_example(client, example_text)
    session = client.post(
        "/sessions", json={"schema_id": schema_id, "root_type": "B"}).json()
    sid = session["id"]

    r = client.post(f"/sessions/{sid}/ops", json={"op": "prune", "node": "n2"})
    assert r.status_code == 200
    doc = r.json()
    ids = {n["id"] for n in doc["tree"]["nodes"]}
    assert ids == {"n0", "n1"}
    assert doc["expression"] == "[D1: D o B; B]"
    assert set(doc["log"][-1]) == {"op", "node", "at"}
    assert doc["log"][-1]["node"] == "n2"

    r = client.post(f"/sessions/{sid}/ops", json={"op": "respider", "node": "n1"})
    assert r.status_code == 200
    # D's only neighbor B is on its path: graph unchanged
    assert {n["id"] for n in r.json()["tree"]["nodes"]} == {"n0", "n1"}


def test_respider_gains_children_beyond_weight_ridge(client):
    text = ("objecttype B\nobjecttype D weight 5\nobjecttype E weight 3\n"
            "spec D B\nspec E D\n")
    schema_id = client.post("/schemas", content=text,
                            headers={"content-type": "text/plain"}).json()["id"]
    session = client.post(
        "/sessions", json={"schema_id": schema_id, "root_type": "B"}).json()
    assert {n["id"] for n in session["tree"]["nodes"]} == {"n0", "n1"}

    r = client.post(f"/sessions/{session['id']}/ops",
                    json={"op": "respider", "node": "n1"})
    ids = {n["id"] for n in r.json()["tree"]["nodes"]}
    assert ids == {"n0", "n1", "n2"}


def test_prune_root_conflict(client, example_text):
    schema_id = upload_example(client, example_text)
    sid = client.post(
        "/sessions", json={"schema_id": schema_id, "root_type": "B"}).json()["id"]
    r = client.post(f"/sessions/{sid}/ops", json={"op": "prune", "node": "n0"})
    assert r.status_code == 409
    assert "root" in r.json()["detail"]
    r = client.post(f"/sessions/{sid}/ops", json={"op": "prune", "node": "n99"})
    assert r.status_code == 409


def test_ops_on_unknown_session(client):
    r = client.post("/sessions/nope/ops", json={"op": "prune", "node": "n1"})
    assert r.status_code == 404
    assert client.get("/sessions/nope").status_code == 404
    assert client.get("/sessions/nope/expression").status_code == 404


def test_expression_formats(client, example_text):
    schema_id = upload_example(client, example_text)
    doc = client.post(
        "/sessions", json={"schema_id": schema_id, "root_type": "B"}).json()
    sid = doc["id"]

    expr = client.get(f"/sessions/{sid}/expression", params={"format": "expr"}).json()
    assert expr["value"] == doc["expression"]
    verbal = client.get(f"/sessions/{sid}/expression", params={"format": "verbal"}).json()
    assert verbal["value"] == doc["verbalization"]
    tree = client.get(f"/sessions/{sid}/expression", params={"format": "tree"}).json()
    assert tree["value"] == doc["tree"]
    default = client.get(f"/sessions/{sid}/expression").json()
    assert default == expr


def test_event_log_replay_reproduces_tree(client, store, example_text,
                                           example_schema, example_graph):
    schema_id = upload_example(client, example_text)
    sid = client.post(
        "/sessions", json={"schema_id": schema_id, "root_type": "B"}).json()["id"]
    client.post(f"/sessions/{sid}/ops", json={"op": "prune", "node": "n3"})
    client.post(f"/sessions/{sid}/ops", json={"op": "respider", "node": "n2"})
    doc = client.get(f"/sessions/{sid}").json()

    replayed = replay_log(example_graph, example_schema, doc["log"])
    assert canonical_json(tree_doc(replayed, example_schema)) == \
        canonical_json(doc["tree"])


def test_persistence_survives_restart(tmp_path, example_text):
    data_dir = tmp_path / "data"
    client = TestClient(create_app(Store(data_dir)))
    schema_id = upload_example(client, example_text)
    sid = client.post(
        "/sessions", json={"schema_id": schema_id, "root_type": "B"}).json()["id"]
    client.post(f"/sessions/{sid}/ops", json={"op": "prune", "node": "n1"})
    before = client.get(f"/sessions/{sid}").json()

    fresh = TestClient(create_app(Store(data_dir)))
    assert fresh.get(f"/schemas/{schema_id}").text == example_text
    after = fresh.get(f"/sessions/{sid}").json()
    assert after == before
    # the reloaded session still accepts operations
    r = fresh.post(f"/sessions/{sid}/ops", json={"op": "prune", "node": "n2"})
    assert r.status_code == 200


def test_concurrent_prunes_are_linearized(store, example_text):
    app = create_app(store)
    setup = TestClient(app)
    schema_id = upload_example(setup, example_text)
    sid = setup.post(
        "/sessions", json={"schema_id": schema_id, "root_type": "B"}).json()["id"]

    # n1 (the D leaf) and n4 (C inside the f-subtree) are disjoint branches
    targets = ["n1", "n4"]
    results = {}

    def hit(node):
        local = TestClient(app)
        results[node] = local.post(f"/sessions/{sid}/ops",
                                   json={"op": "prune", "node": node}).status_code

    threads = [threading.Thread(target=hit, args=(node,)) for node in targets]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    assert all(code == 200 for code in results.values())
    doc = setup.get(f"/sessions/{sid}").json()
    ids = {n["id"] for n in doc["tree"]["nodes"]}
    assert "n1" not in ids and "n4" not in ids
    ops = [(e["op"], e.get("node")) for e in doc["log"]]
    assert ops[0] == ("spider", None)
    assert sorted(ops[1:]) == [("prune", "n1"), ("prune", "n4")]

    # the stored document on disk replays to the same tree
    raw = json.loads((store.session_dir / f"{sid}.json").read_text())
    assert raw == doc
