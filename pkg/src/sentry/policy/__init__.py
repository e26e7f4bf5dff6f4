"""Administrator blacklists, agent decision config, and synchronization."""

from sentry.policy.model import (
    INDICATOR_KEYS,
    PolicySet,
    ScoreConfig,
    parse_banner_entry,
)
from sentry.policy.serialize import MalformedPolicy, parse_policy, serialize_policy
from sentry.policy.sync import (
    NO_CHANGE,
    AuthFailed,
    HttpPolicyFetcher,
    NoChange,
    PolicyFetchError,
    SyncCounters,
    default_policy_path,
    load_policy_file,
    save_policy_file,
    sync_policies,
)

__all__ = [
    "INDICATOR_KEYS",
    "PolicySet",
    "ScoreConfig",
    "parse_banner_entry",
    "MalformedPolicy",
    "parse_policy",
    "serialize_policy",
    "NO_CHANGE",
    "NoChange",
    "AuthFailed",
    "PolicyFetchError",
    "HttpPolicyFetcher",
    "SyncCounters",
    "sync_policies",
    "default_policy_path",
    "load_policy_file",
    "save_policy_file",
]
