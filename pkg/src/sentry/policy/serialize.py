"""Policy file format: a version header plus four named semicolon-delimited
sections in fixed order (sites, words, processes, banners).  Tokens are
written in lexicographic order so serialized policies diff cleanly.
"""
from __future__ import annotations

from sentry.policy.model import PolicySet

SECTION_ORDER = (
    ("sites", "blocked_sites"),
    ("words", "bad_words"),
    ("processes", "malicious_processes"),
    ("banners", "vulnerable_banners"),
)


class MalformedPolicy(ValueError):
    """Missing/duplicated section header or unparseable policy text."""


def serialize_policy(policy: PolicySet) -> bytes:
    lines = [f"version:{policy.version}"]
    for header, attr in SECTION_ORDER:
        lines.append(f"{header}:")
        lines.append(";".join(sorted(getattr(policy, attr))))
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_policy(data: bytes | str) -> PolicySet:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = [ln.rstrip("\r") for ln in text.split("\n")]

    version: int | None = None
    sections: dict[str, list[str]] = {}
    current: str | None = None
    known = {header for header, _ in SECTION_ORDER}

    for raw in lines:
        line = raw.strip()
        if not line and current is None:
            continue
        if line.startswith("version:") and current is None and version is None:
            tail = line[len("version:"):].strip()
            try:
                version = int(tail)
            except ValueError as exc:
                raise MalformedPolicy(f"bad version header {line!r}") from exc
            continue
        header = line[:-1] if line.endswith(":") else None
        if header in known:
            if header in sections:
                raise MalformedPolicy(f"duplicated section {header!r}")
            sections[header] = []
            current = header
            continue
        if current is None:
            raise MalformedPolicy(f"content outside any section: {line!r}")
        if line:
            sections[current].append(line)

    if version is None:
        raise MalformedPolicy("missing version header")
    missing = known - set(sections)
    if missing:
        raise MalformedPolicy(f"missing sections: {sorted(missing)}")

    tokens: dict[str, set[str]] = {}
    for header, attr in SECTION_ORDER:
        toks: set[str] = set()
        for chunk in sections[header]:
            toks.update(t for t in chunk.split(";") if t.strip())
        tokens[attr] = toks
    return PolicySet(version=version, **tokens)
