from __future__ import annotations

import threading
import time

import httpx
import pytest
import uvicorn
from fastapi.testclient import TestClient

from sentry.gateway.app import GatewayConfig, create_gateway_app

ADMIN = {"email": "admin@example.com", "password": "admin-password-1"}
AGENT = {"email": "agent@example.com", "password": "agent-password-1"}
USER = {"email": "user@example.com", "password": "user-password-1"}


@pytest.fixture
def gateway():
    app = create_gateway_app(GatewayConfig())
    client = TestClient(app)
    yield client
    app.state.queue.stop(drain=False)


@pytest.fixture
def admin_token(gateway):
    return login(gateway, **ADMIN)


def login(client, email, password):
    resp = client.post("/api/login", json={"email": email, "password": password})
    assert resp.status_code == 200, resp.text
    return resp.json()["token"]


def register(client, email, password, role="user", token=None):
    headers = {"Authorization": f"Bearer {token}"} if token else {}
    return client.post(
        "/api/user", json={"email": email, "password": password, "role": role}, headers=headers
    )


def bearer(token):
    return {"Authorization": f"Bearer {token}"}


class LiveServer:
    """uvicorn in a background thread on an ephemeral port."""

    def __init__(self, app, host="127.0.0.1"):
        self.config = uvicorn.Config(app, host=host, port=0, log_level="error")
        self.server = uvicorn.Server(self.config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)
        self.url: str | None = None

    def __enter__(self):
        self.thread.start()
        deadline = time.time() + 15
        while time.time() < deadline:
            if self.server.started and self.server.servers:
                sock = self.server.servers[0].sockets[0]
                host, port = sock.getsockname()[:2]
                self.url = f"http://{host}:{port}"
                return self
            time.sleep(0.02)
        raise RuntimeError("live server failed to start")

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=10)


def wait_http(url: str, timeout: float = 10.0) -> None:
    deadline = time.time() + timeout
    while time.time() < deadline:
        try:
            httpx.get(url, timeout=1.0)
            return
        except httpx.HTTPError:
            time.sleep(0.05)
    raise RuntimeError(f"{url} never came up")
