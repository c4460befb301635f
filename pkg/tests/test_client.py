"""Chat clients: request construction, retries, usage accounting, mocks."""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from toonbench.client import (ApiError, ChatRequest, HttpClient,
                              ScriptExhausted, ScriptedClient, ScriptedTurn,
                              TransportError, estimate_tokens)


# -- request construction ----------------------------------------------------


def test_request_body_defaults():
    req = ChatRequest(model="m", messages=(("user", "hi"),))
    body = req.body()
    assert body == {"model": "m", "temperature": 0.0,
                    "messages": [{"role": "user", "content": "hi"}]}


def test_request_body_response_format_is_the_only_jso_difference():
    base = ChatRequest(model="m", messages=(("user", "p"),))
    jso = ChatRequest(model="m", messages=(("user", "p"),),
                      response_format="json_object")
    b1, b2 = base.body(), jso.body()
    assert b2.pop("response_format") == {"type": "json_object"}
    assert b1 == b2


def test_estimate_tokens():
    assert estimate_tokens("") == 0
    assert estimate_tokens("abcd") == 1
    assert estimate_tokens("abcde") == 2
    assert estimate_tokens("é" * 4) == 2  # counts bytes, not characters


# -- scripted mock -----------------------------------------------------------


def test_scripted_client_plays_in_order():
    c = ScriptedClient([ScriptedTurn("one", 10, 1), ScriptedTurn("two", 20, 2)])
    req = ChatRequest(model="m", messages=(("user", "p"),))
    r1, r2 = c.complete(req), c.complete(req)
    assert (r1.content, r1.prompt_tokens, r1.completion_tokens) == ("one", 10, 1)
    assert (r2.content, r2.prompt_tokens, r2.completion_tokens) == ("two", 20, 2)
    assert len(c.requests) == 2


def test_scripted_client_exhaustion():
    c = ScriptedClient([])
    with pytest.raises(ScriptExhausted):
        c.complete(ChatRequest(model="m", messages=(("user", "p"),)))


# -- HTTP client against a local mock server ---------------------------------


class _Handler(BaseHTTPRequestHandler):
    script = []  # list of (status, payload_dict_or_text)
    seen = []

    def do_POST(self):
        n = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(n))
        type(self).seen.append((self.path, body,
                                self.headers.get("Authorization")))
        status, payload = type(self).script.pop(0)
        data = (json.dumps(payload) if isinstance(payload, dict)
                else payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    _Handler.script = []
    _Handler.seen = []
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{httpd.server_address[1]}"
    finally:
        httpd.shutdown()


def _ok_payload(content="hello", usage=True):
    payload = {"choices": [{"message": {"content": content},
                            "finish_reason": "stop"}]}
    if usage:
        payload["usage"] = {"prompt_tokens": 12, "completion_tokens": 7}
    return payload


REQ = ChatRequest(model="m", messages=(("user", "p"),))


def test_http_happy_path(server, monkeypatch):
    monkeypatch.setenv("TOONBENCH_API_KEY", "sekrit")
    _Handler.script = [(200, _ok_payload())]
    resp = HttpClient(server).complete(REQ)
    assert resp.content == "hello"
    assert (resp.prompt_tokens, resp.completion_tokens) == (12, 7)
    assert not resp.usage_estimated
    path, body, auth = _Handler.seen[0]
    assert path == "/chat/completions"
    assert body["model"] == "m" and auth == "Bearer sekrit"


def test_http_retries_429_then_succeeds(server):
    _Handler.script = [(429, {"error": "slow down"}), (200, _ok_payload())]
    resp = HttpClient(server, backoff=0.01).complete(REQ)
    assert resp.content == "hello"
    assert len(_Handler.seen) == 2
    # only the final successful response's usage is recorded
    assert (resp.prompt_tokens, resp.completion_tokens) == (12, 7)


def test_http_missing_usage_is_flagged_and_estimated(server):
    _Handler.script = [(200, _ok_payload("abcdefgh", usage=False))]
    resp = HttpClient(server).complete(REQ)
    assert resp.usage_estimated
    assert resp.completion_tokens == estimate_tokens("abcdefgh")


def test_http_client_error_raises_api_error(server):
    _Handler.script = [(400, {"error": "bad request"})]
    with pytest.raises(ApiError) as ei:
        HttpClient(server).complete(REQ)
    assert ei.value.status == 400
    assert len(_Handler.seen) == 1  # 400 is not retryable


def test_http_retry_exhaustion_raises(server):
    _Handler.script = [(503, "down")] * 3
    with pytest.raises(ApiError) as ei:
        HttpClient(server, retries=2, backoff=0.01).complete(REQ)
    assert ei.value.status == 503


def test_http_connection_refused_is_transport_error():
    client = HttpClient("http://127.0.0.1:1", retries=1, backoff=0.01)
    with pytest.raises(TransportError):
        client.complete(REQ)
