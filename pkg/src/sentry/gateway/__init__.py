"""Central ingestion gateway: HTTP API, auth, TTL cache, job queue,
persistent store, and injection-hardened validation."""

from sentry.gateway.app import GatewayConfig, create_gateway_app
from sentry.gateway.cache import CacheStats, TtlCache
from sentry.gateway.jobs import JobQueue, QueueFull
from sentry.gateway.storage import FileStore, SqliteStore
from sentry.gateway.validate import ValidationFailure, validate_payload

__all__ = [
    "GatewayConfig",
    "create_gateway_app",
    "CacheStats",
    "TtlCache",
    "JobQueue",
    "QueueFull",
    "FileStore",
    "SqliteStore",
    "ValidationFailure",
    "validate_payload",
]
