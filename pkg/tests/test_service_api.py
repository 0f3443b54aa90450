from __future__ import annotations

import io
import itertools
import zipfile
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from conftest import read_fixture
from dflow import parse, validate
from dflow.codegen import PROJECT_FILES
from dflow.service import ModelStore, create_app
from dflow.validator import check_source

HELLO = read_fixture("hello_world.dflow")
WEATHER = read_fixture("weather.dflow")


def ticking_clock():
    counter = itertools.count()
    return lambda: f"2024-01-01T00:00:{next(counter):02d}.000000+00:00"


@pytest.fixture
def store():
    s = ModelStore(":memory:", clock=ticking_clock())
    yield s
    s.close()


@pytest.fixture
def client(store):
    return TestClient(create_app(store))


def post(client, username: str, source: str):
    return client.post("/model", json={"username": username, "source": source})


# -- storage -------------------------------------------------------------------------------------


def test_store_and_read_back(client):
    response = post(client, "alice", HELLO)
    assert response.status_code == 201 and response.json() == {"model_id": 1}
    stored = client.get("/model/1").json()
    assert stored["source"] == HELLO
    assert stored["username"] == "alice" and stored["version"] == 1
    assert set(stored) == {"model_id", "username", "source", "created_at", "updated_at", "version"}


def test_empty_triggers_block_is_accepted(client):
    assert post(client, "alice", "triggers end").status_code == 201


def test_syntax_error_is_422_with_report(client):
    response = post(client, "alice", "Intent x")
    assert response.status_code == 422
    body = response.json()
    assert body["valid"] is False and body["diagnostics"][0]["code"] == "P002"


@pytest.mark.parametrize("payload", [b"not json", b"[]", b'{"username": "a"}', b'{"username": 1, "source": ""}'])
def test_malformed_bodies_are_400(client, payload):
    response = client.post("/model", content=payload, headers={"Content-Type": "application/json"})
    assert response.status_code == 400
    assert "error" in response.json()


def test_older_models_are_kept(client):
    post(client, "alice", HELLO)
    post(client, "alice", WEATHER)
    assert client.get("/model/1").json()["source"] == HELLO
    assert client.get("/user/alice/model/latest").json()["model_id"] == 2


def test_update_bumps_version(client, store):
    post(client, "alice", HELLO)
    response = client.put("/model/1", json={"source": WEATHER})
    assert response.status_code == 200 and response.json() == {"model_id": 1, "version": 2}
    assert client.get("/model/1").json()["source"] == WEATHER
    assert [v for v, _ in store.versions(1)] == [1, 2]


def test_invalid_update_leaves_model_untouched(client):
    post(client, "alice", HELLO)
    response = client.put("/model/1", json={"source": HELLO.replace("on: greet", "on: nope")})
    assert response.status_code == 422
    assert client.get("/model/1").json()["version"] == 1


def test_unknown_ids_are_404(client):
    assert client.get("/model/99").status_code == 404
    assert client.put("/model/99", json={"source": HELLO}).status_code == 404
    assert client.delete("/model/99").status_code == 404
    assert client.get("/user/nobody/model/latest").status_code == 404


def test_delete_removes_every_version(client, store):
    post(client, "alice", HELLO)
    client.put("/model/1", json={"source": WEATHER})
    assert client.delete("/model/1").json() == {"deleted": 1}
    assert client.get("/model/1").status_code == 404
    assert store.versions(1) == []


def test_latest_follows_the_last_write(client):
    post(client, "alice", HELLO)      # id 1
    post(client, "alice", WEATHER)    # id 2
    client.put("/model/1", json={"source": HELLO + "// edited\n"})
    latest = client.get("/user/alice/model/latest").json()
    assert latest["model_id"] == 1 and latest["version"] == 2


def test_repeated_gets_do_not_change_anything(client):
    post(client, "alice", HELLO)
    first = client.get("/model/1").json()
    assert client.get("/model/1").json() == first


# -- validation and codegen ----------------------------------------------------------------------


def test_validation_endpoint(client):
    assert client.post("/model/validation", json={"source": HELLO}).json() == {"valid": True, "diagnostics": []}
    body = client.post("/model/validation", json={"source": HELLO.replace("on: greet", "on: nope")}).json()
    assert body["valid"] is False
    assert [d["code"] for d in body["diagnostics"] if d["severity"] == "error"] == ["V002"]
    assert client.post("/model/validation", json={"source": ""}).json() == {"valid": True, "diagnostics": []}
    assert client.post("/model/validation", json={}).status_code == 400


def test_validation_matches_the_library(client):
    source = HELLO.replace("on: greet", "on: nope")
    assert client.post("/model/validation", json={"source": source}).json() == check_source(source)[1].to_dict()


def test_codegen_endpoint(client):
    response = client.post("/model/codegen", json={"source": HELLO})
    assert response.status_code == 200
    assert response.headers["content-type"] == "application/zip"
    with zipfile.ZipFile(io.BytesIO(response.content)) as archive:
        assert archive.namelist() == list(PROJECT_FILES)
    again = client.post("/model/codegen", json={"source": HELLO})
    assert again.content == response.content


def test_codegen_rejects_invalid_models_with_the_validation_report(client):
    source = HELLO.replace("on: greet", "on: nope")
    response = client.post("/model/codegen", json={"source": source})
    assert response.status_code == 422
    assert response.json() == client.post("/model/validation", json={"source": source}).json()


# -- merge ---------------------------------------------------------------------------------------


def test_merge_of_latest_models(client):
    post(client, "alice", "triggers end")
    post(client, "alice", HELLO)
    post(client, "bob", WEATHER)
    response = client.get("/model/merge")
    assert response.status_code == 200
    merged = parse(response.text)
    assert [i.name for i in merged.intents] == ["greet", "ask_weather"]
    assert validate(merged).valid


def test_merge_of_empty_store(client):
    response = client.get("/model/merge")
    assert response.status_code == 200 and response.text == ""


def test_merge_conflict_is_409(client):
    post(client, "alice", HELLO)
    post(client, "bob", HELLO.replace('"hey",\n', ""))
    response = client.get("/model/merge")
    assert response.status_code == 409
    (conflict,) = response.json()["conflicts"]
    assert conflict["name"] == "greet"


# -- store ---------------------------------------------------------------------------------------


def test_store_survives_restart(tmp_path):
    path = tmp_path / "models.db"
    first = ModelStore(path)
    client = TestClient(create_app(first))
    post(client, "alice", HELLO)
    first.close()
    second = ModelStore(path)
    try:
        restarted = TestClient(create_app(second))
        assert restarted.get("/model/1").json()["source"] == HELLO
        assert restarted.get("/user/alice/model/latest").status_code == 200
    finally:
        second.close()


def test_concurrent_writes_are_serialized(tmp_path):
    store = ModelStore(tmp_path / "c.db")
    try:
        store.create("alice", HELLO)
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(lambda _: store.update(1, WEATHER), range(40)))
            list(pool.map(lambda i: store.create(f"u{i % 4}", HELLO), range(40)))
        assert store.get(1).version == 41
        assert [v for v, _ in store.versions(1)] == list(range(1, 42))
        assert len(store.latest_per_user()) == 5
    finally:
        store.close()
