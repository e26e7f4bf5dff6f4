from __future__ import annotations

import base64

import pytest
from fastapi.testclient import TestClient

from sentry.gateway.app import BLACKLISTS, GatewayConfig, create_gateway_app
from sentry.gateway.storage import table_sizes
from tests.conftest import ADMIN, USER, bearer, login, register
from tests.injection_corpus import ALL_CASES

PNG_B64 = base64.b64encode(b"\x89PNG\r\n\x1a\n" + b"0" * 32).decode()


def alert_body(**overrides):
    body = {
        "pcId": "pc-1",
        "mac": "AA:BB:CC:00:11:22",
        "process": ["editor"],
        "reason": "dns",
        "score": 2.0,
        "indicators": {"dns": 1, "kw": 0, "proc": 0, "port": 0, "hs": 0},
        "register_date": 1000.0,
        "image": {"content": PNG_B64},
    }
    body.update(overrides)
    return body


class TestAuthAndRoles:
    def test_login_returns_token_required_thereafter(self, gateway):
        assert gateway.get("/api/alert").status_code == 401
        token = login(gateway, **ADMIN)
        assert gateway.get("/api/alert", headers=bearer(token)).status_code == 200

    def test_bad_credentials_401(self, gateway):
        resp = gateway.post(
            "/api/login", json={"email": ADMIN["email"], "password": "wrong-password"}
        )
        assert resp.status_code == 401

    def test_rate_limit_after_failed_attempts(self, gateway):
        for _ in range(5):
            gateway.post("/api/login", json={"email": USER["email"], "password": "bad-pass-123"})
        resp = gateway.post("/api/login", json={"email": USER["email"], "password": "bad-pass-123"})
        assert resp.status_code == 429

    def test_register_then_login(self, gateway):
        assert register(gateway, **USER).status_code == 200
        token = login(gateway, **USER)
        assert token

    def test_duplicate_registration_400(self, gateway):
        register(gateway, **USER)
        assert register(gateway, **USER).status_code == 400

    def test_admin_registration_requires_admin(self, gateway):
        resp = register(gateway, "new-admin@example.com", "password-123", role="admin")
        assert resp.status_code == 401
        admin_token = login(gateway, **ADMIN)
        resp = register(gateway, "new-admin@example.com", "password-123", role="admin", token=admin_token)
        assert resp.status_code == 200

    def test_blacklist_mutation_role_matrix(self, gateway, admin_token):
        register(gateway, **USER)
        user_token = login(gateway, **USER)
        for name in BLACKLISTS:
            body = {"port": 22, "banner": "x"} if name == "malicious-port" else {"value": "entry.example"}
            assert gateway.post(f"/api/{name}", json=body).status_code == 401
            assert (
                gateway.post(f"/api/{name}", json=body, headers=bearer(user_token)).status_code
                == 403
            )
            assert (
                gateway.post(f"/api/{name}", json=body, headers=bearer(admin_token)).status_code
                == 200
            )
            assert (
                gateway.delete(f"/api/{name}/999", headers=bearer(user_token)).status_code == 403
            )
            # reads are fine for any authenticated principal
            assert gateway.get(f"/api/{name}", headers=bearer(user_token)).status_code == 200

    def test_user_admin_endpoints(self, gateway, admin_token):
        register(gateway, **USER)
        user_token = login(gateway, **USER)
        assert gateway.get("/api/user", headers=bearer(user_token)).status_code == 403
        users = gateway.get("/api/user", headers=bearer(admin_token)).json()
        target = next(u for u in users if u["email"] == USER["email"])
        assert (
            gateway.delete(f"/api/user/{target['id']}", headers=bearer(user_token)).status_code
            == 403
        )
        assert (
            gateway.delete(f"/api/user/{target['id']}", headers=bearer(admin_token)).status_code
            == 200
        )


class TestAlerts:
    def test_save_retrieve_round_trip(self, gateway, admin_token):
        resp = gateway.post("/api/alert/save", json=alert_body(), headers=bearer(admin_token))
        assert resp.status_code == 200
        alert_id = resp.json()["id"]
        got = gateway.get(f"/api/alert/{alert_id}", headers=bearer(admin_token)).json()
        assert got["pc_id"] == "pc-1"
        assert got["image_ref"] is not None
        assert got["created_at"] > 0

    def test_role_scoping_users_see_own_only(self, gateway, admin_token):
        register(gateway, **USER)
        user_token = login(gateway, **USER)
        gateway.post("/api/alert/save", json=alert_body(pcId="pc-admin"), headers=bearer(admin_token))
        gateway.post("/api/alert/save", json=alert_body(pcId="pc-user"), headers=bearer(user_token))
        mine = gateway.get("/api/alert?page=0&size=10", headers=bearer(user_token)).json()
        assert mine["total"] == 1
        assert mine["items"][0]["pc_id"] == "pc-user"
        everyone = gateway.get("/api/alert?page=0&size=10", headers=bearer(admin_token)).json()
        assert everyone["total"] == 2

    def test_pagination_and_filters(self, gateway, admin_token):
        for i in range(25):
            gateway.post(
                "/api/alert/save",
                json=alert_body(
                    pcId=f"pc-{i}",
                    mac="AA:BB:CC:00:11:22" if i % 2 == 0 else "FF:EE:DD:00:11:22",
                    score=float(i),
                    register_date=1000.0 + i,
                    indicators={"dns": int(i % 3 == 0), "kw": 0, "proc": 0, "port": 0, "hs": 0},
                ),
                headers=bearer(admin_token),
            )
        page = gateway.get("/api/alert?page=1&size=10", headers=bearer(admin_token)).json()
        assert len(page["items"]) == 10 and page["total"] == 25
        filtered = gateway.get(
            "/api/alert?mac=FF:EE:DD:00:11:22&size=100", headers=bearer(admin_token)
        ).json()
        assert filtered["total"] == 12
        scored = gateway.get("/api/alert?min_score=20&size=100", headers=bearer(admin_token)).json()
        assert scored["total"] == 5
        dated = gateway.get(
            "/api/alert?date_from=1010&date_to=1014&size=100", headers=bearer(admin_token)
        ).json()
        assert dated["total"] == 5
        typed = gateway.get("/api/alert?type=dns&size=100", headers=bearer(admin_token)).json()
        assert typed["total"] == 9
        by_score = gateway.get("/api/alert?sort=-score&size=3", headers=bearer(admin_token)).json()
        assert [a["score"] for a in by_score["items"]] == [24.0, 23.0, 22.0]

    def test_idempotent_resend_same_client_id(self, gateway, admin_token):
        first = gateway.post(
            "/api/alert/save", json=alert_body(id=7), headers=bearer(admin_token)
        ).json()
        second = gateway.post(
            "/api/alert/save", json=alert_body(id=7), headers=bearer(admin_token)
        ).json()
        assert first["id"] == second["id"]
        assert second["created"] is False
        total = gateway.get("/api/alert?size=100", headers=bearer(admin_token)).json()["total"]
        assert total == 1

    def test_delete_then_404(self, gateway, admin_token):
        alert_id = gateway.post(
            "/api/alert/save", json=alert_body(), headers=bearer(admin_token)
        ).json()["id"]
        assert gateway.delete(f"/api/alert/{alert_id}", headers=bearer(admin_token)).status_code == 200
        assert gateway.get(f"/api/alert/{alert_id}", headers=bearer(admin_token)).status_code == 404

    def test_read_your_writes_through_cache(self, gateway, admin_token):
        gateway.post("/api/alert/save", json=alert_body(pcId="before"), headers=bearer(admin_token))
        listed = gateway.get("/api/alert?size=100", headers=bearer(admin_token)).json()
        assert listed["total"] == 1
        gateway.post("/api/alert/save", json=alert_body(pcId="after"), headers=bearer(admin_token))
        listed = gateway.get("/api/alert?size=100", headers=bearer(admin_token)).json()
        assert listed["total"] == 2  # mutation invalidated the cached page

    def test_missing_image_reference_400(self, gateway, admin_token):
        resp = gateway.post(
            "/api/alert/save", json=alert_body(image={"id": 404}), headers=bearer(admin_token)
        )
        assert resp.status_code == 400

    def test_404_unknown_alert(self, gateway, admin_token):
        assert gateway.get("/api/alert/777", headers=bearer(admin_token)).status_code == 404

    def test_other_users_alert_forbidden(self, gateway, admin_token):
        register(gateway, **USER)
        user_token = login(gateway, **USER)
        alert_id = gateway.post(
            "/api/alert/save", json=alert_body(), headers=bearer(admin_token)
        ).json()["id"]
        assert gateway.get(f"/api/alert/{alert_id}", headers=bearer(user_token)).status_code == 403


class TestInjectionGate:
    @pytest.mark.parametrize("case", ["string'; DROP TABLE alert; --", "string; ls -la; #"])
    def test_published_payload_shapes(self, gateway, admin_token, case):
        body = {
            "id": 2,
            "pcId": "string",
            "image": {"id": 1},
            "process": case,
            "register_date": "2022-10-25",
        }
        resp = gateway.post("/api/alert/save", json=body, headers=bearer(admin_token))
        assert resp.status_code == 400

    def test_corpus_rejected_with_zero_side_effects(self, gateway, admin_token):
        store = gateway.app.state.store
        before = table_sizes(store)
        for case in ALL_CASES:
            resp = gateway.post(
                "/api/alert/save", json=alert_body(process=case), headers=bearer(admin_token)
            )
            assert resp.status_code == 400, case
        assert table_sizes(store) == before


class TestImages:
    def test_image_round_trip(self, gateway, admin_token):
        resp = gateway.post("/api/image", json={"content": PNG_B64}, headers=bearer(admin_token))
        assert resp.status_code == 200
        image_id = resp.json()["id"]
        got = gateway.get(f"/api/image/{image_id}", headers=bearer(admin_token)).json()
        assert base64.b64decode(got["content"]).startswith(b"\x89PNG")

    def test_null_image_400(self, gateway, admin_token):
        resp = gateway.post("/api/image", json={"content": None}, headers=bearer(admin_token))
        assert resp.status_code == 400

    def test_oversized_image_400(self, gateway):
        from sentry.gateway.app import GatewayConfig, create_gateway_app

        app = create_gateway_app(GatewayConfig(max_image_bytes=64))
        client = TestClient(app)
        token = login(client, **ADMIN)
        big = base64.b64encode(b"x" * 128).decode()
        resp = client.post("/api/image", json={"content": big}, headers=bearer(token))
        assert resp.status_code == 400
        app.state.queue.stop(drain=False)

    def test_image_delete_admin_only(self, gateway, admin_token):
        register(gateway, **USER)
        user_token = login(gateway, **USER)
        image_id = gateway.post(
            "/api/image", json={"content": PNG_B64}, headers=bearer(admin_token)
        ).json()["id"]
        assert gateway.delete(f"/api/image/{image_id}", headers=bearer(user_token)).status_code == 403
        assert gateway.delete(f"/api/image/{image_id}", headers=bearer(admin_token)).status_code == 200


class TestBlacklistsAndPolicyVersion:
    def test_add_bumps_version_by_one(self, gateway, admin_token):
        v0 = gateway.get("/api/policy-version", headers=bearer(admin_token)).json()["version"]
        gateway.post(
            "/api/malicious-website", json={"value": "evil.example"}, headers=bearer(admin_token)
        )
        v1 = gateway.get("/api/policy-version", headers=bearer(admin_token)).json()["version"]
        assert v1 == v0 + 1

    def test_duplicate_add_is_noop(self, gateway, admin_token):
        gateway.post("/api/bad-language", json={"value": "slur"}, headers=bearer(admin_token))
        v1 = gateway.get("/api/policy-version", headers=bearer(admin_token)).json()["version"]
        resp = gateway.post(
            "/api/bad-language", json={"value": "SLUR"}, headers=bearer(admin_token)
        ).json()
        assert resp["created"] is False
        v2 = gateway.get("/api/policy-version", headers=bearer(admin_token)).json()["version"]
        assert v1 == v2
        assert gateway.get("/api/bad-language", headers=bearer(admin_token)).json() == ["slur"]

    def test_port_list_string_contract(self, gateway, admin_token):
        gateway.post(
            "/api/malicious-port",
            json={"port": 21, "banner": "vsftpd 2.3.4"},
            headers=bearer(admin_token),
        )
        listed = gateway.get("/api/malicious-port", headers=bearer(admin_token)).json()
        assert listed == ["21:vsftpd 2.3.4"]

    def test_delete_entry(self, gateway, admin_token):
        entry = gateway.post(
            "/api/malicious-process", json={"value": "keylogger.exe"}, headers=bearer(admin_token)
        ).json()
        resp = gateway.delete(
            f"/api/malicious-process/{entry['id']}", headers=bearer(admin_token)
        )
        assert resp.status_code == 200
        assert gateway.get("/api/malicious-process", headers=bearer(admin_token)).json() == []

    def test_detail_mode_returns_ids(self, gateway, admin_token):
        gateway.post("/api/bad-language", json={"value": "slur"}, headers=bearer(admin_token))
        rows = gateway.get("/api/bad-language?detail=full", headers=bearer(admin_token)).json()
        assert rows[0]["id"] >= 1 and rows[0]["value"] == "slur"


class TestExportVerifyEndpoints:
    def test_export_verify_round_trip(self, gateway, admin_token):
        alert_id = gateway.post(
            "/api/alert/save", json=alert_body(), headers=bearer(admin_token)
        ).json()["id"]
        export = gateway.get(f"/api/alert/{alert_id}/export", headers=bearer(admin_token)).json()
        assert len(export["hash"]) == 64
        resp = gateway.post("/api/alert/verify", json=export, headers=bearer(admin_token))
        assert resp.json()["valid"] is True
        export["alert"]["pc_id"] = "tampered"
        resp = gateway.post("/api/alert/verify", json=export, headers=bearer(admin_token))
        assert resp.json()["valid"] is False


class TestMetrics:
    def test_fresh_boot_zero_counters(self):
        app = create_gateway_app(GatewayConfig())
        client = TestClient(app)
        text = client.get("/metrics").text
        metrics = dict(line.split() for line in text.strip().splitlines())
        assert metrics["cache_hits"] == "0" and metrics["cache_misses"] == "0"
        assert float(metrics["queue_l"]) == 0.0
        app.state.queue.stop(drain=False)

    def test_percentiles_present_and_ordered(self, gateway, admin_token):
        for _ in range(20):
            gateway.get("/api/alert?size=5", headers=bearer(admin_token))
        metrics = dict(
            line.split() for line in gateway.get("/metrics").text.strip().splitlines()
        )
        p90 = float(metrics["request_latency_p90_ms"])
        p95 = float(metrics["request_latency_p95_ms"])
        mean = float(metrics["request_latency_mean_ms"])
        assert p95 >= p90 >= 0.0
        assert p95 >= mean * 0.5  # sanity: same scale

    def test_cache_stats_single_source_of_truth(self, gateway, admin_token):
        gateway.get("/api/alert?size=5", headers=bearer(admin_token))
        gateway.get("/api/alert?size=5", headers=bearer(admin_token))
        stats = gateway.app.state.cache.stats
        metrics = dict(
            line.split() for line in gateway.get("/metrics").text.strip().splitlines()
        )
        assert int(metrics["cache_hits"]) == stats.n_hit
        assert int(metrics["cache_misses"]) == stats.n_miss


class TestQueueBackpressure:
    def test_queue_full_429_with_retry_after(self):
        import threading

        release = threading.Event()
        app = create_gateway_app(
            GatewayConfig(queue_capacity=1, queue_workers=1),
            job_handler=lambda kind, payload: release.wait(5),
        )
        client = TestClient(app)
        token = login(client, **ADMIN)
        statuses = []
        for i in range(6):
            resp = client.post(
                "/api/alert/save", json=alert_body(pcId=f"pc-{i}"), headers=bearer(token)
            )
            statuses.append(resp.status_code)
        release.set()
        assert 429 in statuses
        rejected = [s for s in statuses if s == 429]
        assert rejected  # Retry-After present on those responses
        app.state.queue.stop(drain=False)
