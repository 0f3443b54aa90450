from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES, read_fixture
from dflow import model as m, parse
from dflow.runtime import (
    CoercionError,
    HttpEnv,
    MissingKeyError,
    NetworkError,
    Request,
    StatusError,
    Stub,
    StubTable,
    compose_url,
    extract_path,
    invoke,
)
from dflow.runtime.services import coerce

DEMO = parse(read_fixture("demo.dflow"))


def call_of(model: m.Model, dialogue: str, slot_index: int) -> m.ServiceCall:
    form = next(d for d in model.dialogues if d.name == dialogue).responses[0]
    return form.slots[slot_index].source.call


def test_joke_question_is_extracted():
    env = StubTable([Stub("GET", "http://services.issel.ee.auth.gr/quotes/get_joke*", 200,
                          {"question": "q", "answer": "a"})])
    value = invoke(DEMO, call_of(DEMO, "joke_dialogue", 0), env, lambda e: e.value, "str")
    assert value == "q"


def test_nested_path():
    assert extract_path({"data": {"address": "X"}}, "data.address", "u") == "X"
    assert extract_path([1], None, "u") == [1]


def test_missing_key_names_the_key():
    with pytest.raises(MissingKeyError) as info:
        extract_path({}, "missing", "http://x/y")
    assert info.value.key == "missing" and info.value.url == "http://x/y"
    assert "missing" in str(info.value)


def test_non_2xx_is_a_status_error():
    env = StubTable([Stub("GET", "http://services.issel.ee.auth.gr/*", 404, {})])
    with pytest.raises(StatusError) as info:
        invoke(DEMO, call_of(DEMO, "joke_dialogue", 0), env, lambda e: e.value, "str")
    assert info.value.status == 404
    assert info.value.url == "http://services.issel.ee.auth.gr/quotes/get_joke?language=English"


def test_coercion_error_carries_url():
    env = StubTable([Stub("GET", "http://services.issel.ee.auth.gr/*", 200, {"answer": "lots"})])
    with pytest.raises(CoercionError) as info:
        invoke(DEMO, call_of(DEMO, "joke_dialogue", 1), env, lambda e: e.value, "int")
    assert info.value.url.endswith("/quotes/get_joke?language=English")


def test_compose_url_with_port_path_params_and_query():
    svc = m.EServiceHTTP("s", "GET", "http://h/", "/items/{id}", 8080)
    assert compose_url(svc, {"id": "a b"}, {"q": True, "n": 2}) == "http://h:8080/items/a%20b?q=true&n=2"
    bare = m.EServiceHTTP("s", "GET", "http://h", "v1")
    assert compose_url(bare, {"extra": 5}) == "http://h/v1/5"


@pytest.mark.parametrize(
    "value, slot_type, expected",
    [
        ("12", "int", 12), (3.0, "int", 3), (" 2.5 ", "float", 2.5), (7, "float", 7.0),
        ("Yes", "bool", True), ("0", "bool", False), (42, "str", "42"), (True, "str", "true"),
        ({"b": 1, "a": 2}, "str", '{"a": 2, "b": 1}'),
    ],
)
def test_coerce(value, slot_type, expected):
    result = coerce(value, slot_type)
    assert result == expected and type(result) is type(expected)


@pytest.mark.parametrize("value, slot_type", [("x", "int"), (2.5, "int"), (True, "int"), ("maybe", "bool"),
                                              (None, "float"), ([1], "int")])
def test_coerce_rejects(value, slot_type):
    with pytest.raises(ValueError):
        coerce(value, slot_type)


@given(st.integers())
def test_int_coercion_round_trips(number):
    assert coerce(str(number), "int") == number


def test_stub_table_matching():
    table = StubTable.load(FIXTURES / "demo_stubs.json")
    hit = table.send(Request("GET", "http://services.issel.ee.auth.gr/quotes/get_joke?language=English"))
    assert hit.body["answer"] == 42
    with pytest.raises(NetworkError):
        table.send(Request("POST", "http://services.issel.ee.auth.gr/quotes/get_joke"))
    exact = StubTable([Stub("GET", "http://h/p")])
    assert exact.send(Request("GET", "http://h/p?x=1")).status == 200
    with pytest.raises(NetworkError):
        exact.send(Request("GET", "http://h/p/q"))


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 (http.server naming)
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length) or b"null")
        body = json.dumps({"echo": payload, "token": self.headers.get("access_token"), "path": self.path})
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(body.encode())

    def do_GET(self):  # noqa: N802
        self.send_response(500)
        self.end_headers()
        self.wfile.write(b"boom")

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()
    httpd.server_close()


def test_live_http_call(server):
    model = parse(f"""eservices EServiceHTTP echo verb: POST host: '{server}' path: '/e/{{id}}' end end""")
    call = m.ServiceCall("echo", path=(("id", m.Literal(7)),), query=(("q", m.Literal("x")),),
                         header=(("access_token", m.Literal("T")),), body=(("k", m.Literal(1)),),
                         response_path="echo.k")
    assert invoke(model, call, HttpEnv(timeout=5), lambda e: e.value, "int") == 1
    whole = invoke(model, m.ServiceCall("echo", path=(("id", m.Literal("a b")),),
                                        header=(("access_token", m.Literal("T")),)),
                   HttpEnv(timeout=5), lambda e: e.value)
    assert whole["token"] == "T" and whole["path"] == "/e/a%20b"


def test_live_http_errors(server):
    env = HttpEnv(timeout=5)
    assert env.send(Request("GET", server + "/x")).status == 500
    assert env.send(Request("GET", server + "/x")).body == "boom"
    with pytest.raises(NetworkError):
        env.send(Request("GET", "http://127.0.0.1:1/unreachable"))
