"""Gateway HTTP API.

Endpoint families under /api: alert (+ /alert/save), image, the four
blacklists, user, login, plus policy-version, export/verify, health, and
the /metrics text exposition.  Role matrix: blacklist mutations and user
administration are admin-only; regular users see their own alerts only;
the blacklist GETs serve any authenticated principal (agents sync with
user-role credentials).
"""
from __future__ import annotations

import base64
import logging
import time
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from sentry.audit.records import AlertExport, MalformedExport, export_alert, verify_export
from sentry.gateway.auth import (
    LoginRateLimiter,
    Principal,
    TokenRegistry,
    hash_password,
    verify_password,
)
from sentry.gateway.cache import TtlCache
from sentry.gateway.jobs import JobQueue, QueueFull
from sentry.gateway.metrics import MetricsCollector, render_metrics
from sentry.gateway.storage import FileStore, SqliteStore, StorageBackend
from sentry.gateway.validate import DEFAULT_MAX_IMAGE_BYTES, ValidationFailure, validate_payload

log = logging.getLogger(__name__)

BLACKLISTS = {
    "malicious-website": "sites",
    "bad-language": "words",
    "malicious-process": "processes",
    "malicious-port": "ports",
}


@dataclass
class GatewayConfig:
    storage_path: str | None = None
    storage_backend: str = "file"  # file | sqlite
    ttl_seconds: float = 20.0
    queue_capacity: int = 100
    queue_workers: int = 2
    max_image_bytes: int = DEFAULT_MAX_IMAGE_BYTES
    admin_email: str = "admin@example.com"
    admin_password: str = "admin-password-1"
    token_ttl: float = 3600.0
    cache_hit_delay: float = 0.0
    static_dir: str | None = None


def _make_store(config: GatewayConfig) -> StorageBackend:
    if config.storage_backend == "sqlite":
        return SqliteStore(config.storage_path or ":memory:")
    return FileStore(config.storage_path)


def _bearer(request: Request) -> str | None:
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip()
    return None


def create_gateway_app(
    config: GatewayConfig | None = None,
    store: StorageBackend | None = None,
    job_handler=None,
    clock=time.monotonic,
) -> FastAPI:
    config = config or GatewayConfig()
    store = store or _make_store(config)
    tokens = TokenRegistry(ttl_seconds=config.token_ttl, clock=clock)
    cache = TtlCache(ttl_seconds=config.ttl_seconds, clock=clock, hit_delay=config.cache_hit_delay)
    limiter = LoginRateLimiter(clock=clock)
    collector = MetricsCollector()

    def default_job_handler(kind: str, payload: dict) -> None:
        # alert post-processing: notification fan-out goes to the outbox
        if kind == "alert_postprocess":
            alert = store.get("alerts", payload["alert_id"])
            if alert is None:
                return
            store.insert(
                "outbox",
                {
                    "alert_id": alert["id"],
                    "severity": alert.get("score", 0.0),
                    "note": f"alert {alert['id']} from {alert.get('pc_id', '?')}",
                },
            )

    queue = JobQueue(
        handler=job_handler or default_job_handler,
        capacity=config.queue_capacity,
        workers=config.queue_workers,
        clock=clock,
    )
    queue.start()

    app = FastAPI(title="gateway-central", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.cache = cache
    app.state.queue = queue
    app.state.tokens = tokens
    app.state.config = config
    app.state.collector = collector

    # bootstrap administrator
    if not store.find("users", lambda r: r.get("email") == config.admin_email):
        store.insert(
            "users",
            {
                "email": config.admin_email,
                "password_hash": hash_password(config.admin_password),
                "role": "admin",
            },
        )

    # -- helpers -----------------------------------------------------

    def auth(request: Request) -> Principal:
        token = _bearer(request)
        principal = tokens.resolve(token) if token else None
        if principal is None:
            raise HTTPException(status_code=401, detail="authentication required")
        return principal

    def require_admin(principal: Principal) -> None:
        if principal.role != "admin":
            raise HTTPException(status_code=403, detail="admin role required")

    async def read_json(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="request body must be JSON")
        if not isinstance(body, dict):
            raise HTTPException(status_code=400, detail="request body must be a JSON object")
        return body

    def policy_version() -> int:
        rows = store.rows("policy_events")
        return rows[-1]["id"] if rows else 0

    def bump_policy_version(action: str, table: str, value: str) -> int:
        return store.insert("policy_events", {"action": action, "table": table, "value": value})

    @app.exception_handler(ValidationFailure)
    async def _validation_handler(_request, exc: ValidationFailure):
        return JSONResponse(status_code=400, content=exc.body())

    @app.middleware("http")
    async def _timing(request: Request, call_next):
        t0 = time.perf_counter()
        response = await call_next(request)
        collector.record_request(time.perf_counter() - t0)
        return response

    # -- health & metrics ----------------------------------------------

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/metrics")
    def metrics():
        return PlainTextResponse(
            render_metrics(collector, cache.stats, queue, extra={"policy_version": policy_version()})
        )

    # -- users & login ---------------------------------------------------

    @app.post("/api/user")
    async def register_user(request: Request):
        body = validate_payload("user", await read_json(request))
        if body["role"] == "admin":
            require_admin(auth(request))
        if store.find("users", lambda r: r.get("email") == body["email"]):
            raise HTTPException(status_code=400, detail="email already registered")
        user_id = store.insert(
            "users",
            {
                "email": body["email"],
                "password_hash": hash_password(body["password"]),
                "role": body["role"],
            },
        )
        return {"id": user_id, "email": body["email"], "role": body["role"]}

    @app.get("/api/user")
    def list_users(request: Request):
        require_admin(auth(request))
        return [
            {"id": r["id"], "email": r["email"], "role": r["role"]} for r in store.rows("users")
        ]

    @app.delete("/api/user/{user_id}")
    def delete_user(user_id: int, request: Request):
        require_admin(auth(request))
        if not store.delete("users", user_id):
            raise HTTPException(status_code=404, detail="user not found")
        return {"deleted": user_id}

    @app.post("/api/login")
    async def login(request: Request):
        body = validate_payload("login", await read_json(request))
        email = body["email"]
        if limiter.blocked(email):
            return JSONResponse(
                status_code=429,
                content={"error": "rate_limited", "detail": "too many failed attempts"},
            )
        users = store.find("users", lambda r: r.get("email") == email)
        if not users or not verify_password(body["password"], users[0]["password_hash"]):
            limiter.record_failure(email)
            raise HTTPException(status_code=401, detail="invalid credentials")
        limiter.reset(email)
        user = users[0]
        principal = Principal(user_id=user["id"], email=user["email"], role=user["role"])
        return {"token": tokens.issue(principal), "role": user["role"], "email": user["email"]}

    # -- alerts ----------------------------------------------------------

    def _store_alert(body: dict, principal: Principal) -> tuple[int, bool]:
        sanitized = validate_payload("alert", body, config.max_image_bytes)
        client_id = sanitized.get("client_id")
        if client_id:
            existing = store.find(
                "alerts",
                lambda r: r.get("client_id") == client_id and r.get("pc_id") == sanitized["pc_id"],
            )
            if existing:
                return existing[0]["id"], False  # idempotent retry
        image_ref = sanitized.pop("image_blob", None)
        if image_ref is not None:
            blob_id = store.put_blob(image_ref)
            image_id = store.insert("images", {"size": len(image_ref), "blob": blob_id})
            sanitized["image_ref"] = image_id
        elif "image_id" in sanitized:
            image_id = sanitized.pop("image_id")
            if store.get("images", image_id) is None:
                raise ValidationFailure("missing_image", "image.id", f"image {image_id} not found")
            sanitized["image_ref"] = image_id
        else:
            sanitized["image_ref"] = None  # empty-evidence marker
        sanitized["owner"] = principal.email
        sanitized["created_at"] = time.time()
        alert_id = store.insert("alerts", sanitized)
        return alert_id, True

    @app.post("/api/alert/save")
    @app.post("/api/alert")
    async def save_alert(request: Request):
        principal = auth(request)
        if queue.is_full():
            return JSONResponse(
                status_code=429,
                content={"error": "queue_full"},
                headers={"Retry-After": "1"},
            )
        alert_id, created = _store_alert(await read_json(request), principal)
        if created:
            cache.invalidate_prefix("alert:")
            try:
                queue.enqueue("alert_postprocess", {"alert_id": alert_id})
            except QueueFull:
                log.warning("job queue filled after admission of alert %s", alert_id)
        return {"id": alert_id, "created": created}

    def _visible_alerts(principal: Principal) -> list[dict]:
        rows = store.rows("alerts")
        if principal.role == "admin":
            return rows
        return [r for r in rows if r.get("owner") == principal.email]

    def _date_key(value) -> tuple:
        try:
            return (0, float(value))
        except (TypeError, ValueError):
            return (1, str(value))

    @app.get("/api/alert")
    def list_alerts(
        request: Request,
        page: int = 0,
        size: int = 10,
        mac: str | None = None,
        date_from: str | None = None,
        date_to: str | None = None,
        type: str | None = None,
        min_score: float | None = None,
        sort: str = "-id",
    ):
        principal = auth(request)
        if page < 0 or not 1 <= size <= 100:
            raise HTTPException(status_code=400, detail="bad pagination parameters")
        key = (
            f"alert:{principal.role}:{principal.email}:{page}:{size}:{mac}:"
            f"{date_from}:{date_to}:{type}:{min_score}:{sort}"
        )

        def load() -> dict:
            rows = _visible_alerts(principal)
            if mac:
                rows = [r for r in rows if r.get("mac") == mac]
            if date_from is not None:
                rows = [
                    r
                    for r in rows
                    if "register_date" in r and _date_key(r["register_date"]) >= _date_key(date_from)
                ]
            if date_to is not None:
                rows = [
                    r
                    for r in rows
                    if "register_date" in r and _date_key(r["register_date"]) <= _date_key(date_to)
                ]
            if type:
                rows = [r for r in rows if r.get("indicators", {}).get(type) == 1]
            if min_score is not None:
                rows = [r for r in rows if r.get("score", 0.0) >= min_score]
            reverse = sort.startswith("-")
            field = sort.lstrip("-")
            if field not in ("id", "score"):
                raise HTTPException(status_code=400, detail="sort must be id or score")
            rows.sort(key=lambda r: r.get(field) or 0, reverse=reverse)
            total = len(rows)
            window = rows[page * size : (page + 1) * size]
            return {"items": window, "total": total, "page": page, "size": size}

        return cache.cached_get(key, load)

    def _load_alert_checked(alert_id: int, principal: Principal) -> dict:
        alert = store.get("alerts", alert_id)
        if alert is None:
            raise HTTPException(status_code=404, detail="alert not found")
        if principal.role != "admin" and alert.get("owner") != principal.email:
            raise HTTPException(status_code=403, detail="not your alert")
        return alert

    @app.get("/api/alert/{alert_id}")
    def get_alert(alert_id: int, request: Request):
        return _load_alert_checked(alert_id, auth(request))

    @app.delete("/api/alert/{alert_id}")
    def delete_alert(alert_id: int, request: Request):
        principal = auth(request)
        _load_alert_checked(alert_id, principal)
        store.delete("alerts", alert_id)
        cache.invalidate_prefix("alert:")
        return {"deleted": alert_id}

    @app.get("/api/alert/{alert_id}/export")
    def export_alert_endpoint(alert_id: int, request: Request, hash_version: int = 1):
        alert = _load_alert_checked(alert_id, auth(request))
        return export_alert(alert, hash_version=hash_version).__dict__

    @app.post("/api/alert/verify")
    async def verify_alert_export(request: Request):
        auth(request)
        body = await read_json(request)
        try:
            result = verify_export(AlertExport.from_dict(body))
        except MalformedExport as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"valid": result.valid, "reason": result.reason}

    # -- images -----------------------------------------------------------

    @app.post("/api/image")
    async def save_image(request: Request):
        auth(request)
        body = validate_payload("image", await read_json(request), config.max_image_bytes)
        blob_id = store.put_blob(body["blob"])
        image_id = store.insert("images", {"size": len(body["blob"]), "blob": blob_id})
        return {"id": image_id, "size": len(body["blob"])}

    @app.get("/api/image/{image_id}")
    def get_image(image_id: int, request: Request):
        auth(request)
        record = store.get("images", image_id)
        if record is None:
            raise HTTPException(status_code=404, detail="image not found")
        blob = store.get_blob(record["blob"]) or b""
        return {
            "id": record["id"],
            "size": record["size"],
            "content": base64.b64encode(blob).decode("ascii"),
        }

    @app.delete("/api/image/{image_id}")
    def delete_image(image_id: int, request: Request):
        require_admin(auth(request))
        record = store.get("images", image_id)
        if record is None:
            raise HTTPException(status_code=404, detail="image not found")
        store.delete_blob(record["blob"])
        store.delete("images", image_id)
        return {"deleted": image_id}

    # -- blacklists --------------------------------------------------------

    @app.get("/api/policy-version")
    def get_policy_version(request: Request):
        auth(request)
        return {"version": policy_version()}

    def _register_blacklist(name: str, table: str) -> None:
        is_ports = name == "malicious-port"

        @app.get(f"/api/{name}")
        def list_entries(request: Request, detail: str | None = None):
            auth(request)
            rows = store.rows(table)
            if detail == "full":
                return rows
            if is_ports:
                return [
                    f"{r['port']}:{r['banner']}" if r.get("banner") else str(r["port"])
                    for r in rows
                ]
            return [r["value"] for r in rows]

        @app.post(f"/api/{name}")
        async def add_entry(request: Request):
            require_admin(auth(request))
            body = await read_json(request)
            if is_ports:
                entry = validate_payload("port", body)
                duplicate = store.find(
                    "ports",
                    lambda r: r["port"] == entry["port"] and r.get("banner") == entry["banner"],
                )
            else:
                entry = validate_payload("blacklist", body)
                entry["value"] = entry["value"].casefold()
                duplicate = store.find(table, lambda r: r.get("value") == entry["value"])
            if duplicate:
                return {"id": duplicate[0]["id"], "created": False, "version": policy_version()}
            rec_id = store.insert(table, entry)
            version = bump_policy_version("add", table, str(entry))
            return {"id": rec_id, "created": True, "version": version}

        @app.delete(f"/api/{name}/{{entry_id}}")
        def delete_entry(entry_id: int, request: Request):
            require_admin(auth(request))
            if not store.delete(table, entry_id):
                raise HTTPException(status_code=404, detail="entry not found")
            version = bump_policy_version("remove", table, str(entry_id))
            return {"deleted": entry_id, "version": version}

    for _name, _table in BLACKLISTS.items():
        _register_blacklist(_name, _table)

    if config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
