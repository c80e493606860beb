"""Domain types and lexical decomposition for URLs and emails.

The structural parts of a web address (scheme, userinfo, host labels,
registrable domain, path, ...) are exactly what the game teaches players
to read, so the parser is deliberately small, strict and hand-rolled:
only http/https, hosts must yield a registrable domain from the bundled
public-suffix snapshot, and internationalized labels are preserved
verbatim so that look-alike characters survive into the detector.

The deception-trick taxonomy (:class:`TrickTag`) is shared by the corpus
generator, the heuristic oracle, the in-game help and the feedback texts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Optional, Union


class MalformedUrl(ValueError):
    """Raised when a string cannot be decomposed into UrlParts."""


class MalformedAddress(ValueError):
    """Raised when an email address cannot be decomposed."""


def _load_data(name: str) -> dict:
    with resources.files("phishgame.data").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


#: Frozen public-suffix snapshot; longest match wins.
PUBLIC_SUFFIXES: frozenset[str] = frozenset(_load_data("suffixes.json")["suffixes"])

#: look-alike -> genuine character sequence, applied longest-key-first.
HOMOGLYPHS: dict[str, str] = dict(_load_data("homoglyphs.json")["pairs"])
_HOMOGLYPH_ORDER = sorted(HOMOGLYPHS, key=len, reverse=True)

_ALLOWED_SCHEMES = ("http", "https")


class TrickTag(str, Enum):
    """Deception techniques a fake item can carry."""

    IP_ADDRESS_HOST = "IpAddressHost"
    USERINFO_DECEPTION = "UserinfoDeception"
    TYPOSQUAT = "Typosquat"
    HOMOGLYPH_SUBSTITUTION = "HomoglyphSubstitution"
    DECEPTIVE_SUBDOMAIN = "DeceptiveSubdomain"
    HYPHENATED_BRAND = "HyphenatedBrand"
    WRONG_TLD = "WrongTld"
    NO_HTTPS = "NoHttps"
    LINK_TEXT_MISMATCH = "LinkTextMismatch"
    REPLY_TO_MISMATCH = "ReplyToMismatch"
    URGENT_LANGUAGE = "UrgentLanguage"


#: Tags that only make sense on an email payload.
EMAIL_ONLY_TAGS = frozenset(
    {TrickTag.LINK_TEXT_MISMATCH, TrickTag.REPLY_TO_MISMATCH, TrickTag.URGENT_LANGUAGE}
)

#: Tags that rewrite the host identity; mutually exclusive on one item.
HOST_IDENTITY_TAGS = frozenset(
    {
        TrickTag.IP_ADDRESS_HOST,
        TrickTag.TYPOSQUAT,
        TrickTag.HOMOGLYPH_SUBSTITUTION,
        TrickTag.DECEPTIVE_SUBDOMAIN,
        TrickTag.HYPHENATED_BRAND,
        TrickTag.WRONG_TLD,
    }
)


@dataclass(frozen=True)
class UrlParts:
    """A decomposed http(s) URL.

    ``raw`` keeps the original string for display but is excluded from
    equality so the parse/serialize round-trip law can hold structurally.
    """

    scheme: str
    host: tuple[str, ...]
    registrable_domain: str
    path: str = ""
    userinfo: Optional[str] = None
    port: Optional[int] = None
    query: Optional[str] = None
    fragment: Optional[str] = None
    raw: str = field(default="", compare=False)

    @property
    def host_str(self) -> str:
        return ".".join(self.host)

    @property
    def is_ip_host(self) -> bool:
        return _is_dotted_quad(self.host)

    @property
    def subdomain_labels(self) -> tuple[str, ...]:
        """Labels in front of the registrable domain (empty for IP hosts)."""
        if self.is_ip_host:
            return ()
        n = len(self.registrable_domain.split("."))
        return self.host[:-n]


@dataclass(frozen=True)
class EmailAddress:
    local: str
    host: tuple[str, ...]
    registrable_domain: str

    def __str__(self) -> str:
        return f"{self.local}@{'.'.join(self.host)}"


@dataclass(frozen=True)
class EmailItem:
    """A (possibly deceptive) email: sender, subject and embedded links.

    A mismatch between an anchor text and its href is representable by
    construction; nothing here validates honesty, only parseability.
    """

    display_name: str
    from_address: EmailAddress
    subject: str
    body_links: tuple[tuple[str, UrlParts], ...]
    reply_to: Optional[EmailAddress] = None
    urgency_flag: bool = False


Payload = Union[UrlParts, EmailItem]


@dataclass(frozen=True)
class PhishItem:
    """The atom of gameplay and assessment: one URL or email with ground truth."""

    item_id: str
    kind: str  # "url" | "email"
    payload: Payload
    legitimate: bool
    tricks: tuple[TrickTag, ...]
    explanations: tuple[tuple[TrickTag, str], ...]
    brand: str

    def __post_init__(self) -> None:
        if self.kind not in ("url", "email"):
            raise ValueError(f"unknown item kind {self.kind!r}")
        if self.legitimate != (len(self.tricks) == 0):
            raise ValueError("legitimate flag and trick tags are inconsistent")
        if self.kind == "url" and not isinstance(self.payload, UrlParts):
            raise ValueError("url item needs a UrlParts payload")
        if self.kind == "email" and not isinstance(self.payload, EmailItem):
            raise ValueError("email item needs an EmailItem payload")

    @property
    def display_text(self) -> str:
        """The string a player sees in the balloon dialog."""
        if isinstance(self.payload, UrlParts):
            return serialize_url(self.payload)
        return f"From: {self.payload.display_name} <{self.payload.from_address}> — {self.payload.subject}"


def _is_dotted_quad(labels: tuple[str, ...]) -> bool:
    if len(labels) != 4:
        return False
    for label in labels:
        if not label.isdigit() or len(label) > 3:
            return False
        if int(label) > 255:
            return False
        if len(label) > 1 and label[0] == "0":
            return False
    return True


def _valid_label(label: str) -> bool:
    if not label or label.startswith("-") or label.endswith("-"):
        return False
    return all(ch.isalnum() or ch in "-_" for ch in label)


def registrable_domain_of(labels: tuple[str, ...]) -> str:
    """Longest-suffix match against the bundled snapshot.

    Falls back to the last two labels for unknown TLDs so attacker-hosted
    domains outside the snapshot still decompose deterministically.
    """
    if _is_dotted_quad(labels):
        return ".".join(labels)
    best = None
    for start in range(len(labels)):
        cand = ".".join(labels[start:])
        if cand in PUBLIC_SUFFIXES and (best is None or start < best):
            best = start
    if best is not None:
        if best == 0:
            raise MalformedUrl(f"host {'.'.join(labels)!r} is a bare public suffix")
        return ".".join(labels[best - 1:])
    return ".".join(labels[-2:])


def _parse_host(text: str) -> tuple[tuple[str, ...], str]:
    host = text.lower().rstrip(".")
    if not host:
        raise MalformedUrl("empty host")
    labels = tuple(host.split("."))
    if any(not _valid_label(l) for l in labels):
        raise MalformedUrl(f"invalid host label in {text!r}")
    if len(labels) < 2:
        raise MalformedUrl(f"host {text!r} has no registrable domain")
    return labels, registrable_domain_of(labels)


def parse_url(raw: str) -> UrlParts:
    """Decompose ``raw`` into UrlParts (RFC-3986 generic syntax, http/https only)."""
    if not raw:
        raise MalformedUrl("empty URL")
    if "://" not in raw:
        raise MalformedUrl(f"no scheme separator in {raw!r}")
    scheme, rest = raw.split("://", 1)
    scheme = scheme.lower()
    if scheme not in _ALLOWED_SCHEMES:
        raise MalformedUrl(f"unsupported scheme {scheme!r}")

    fragment = None
    if "#" in rest:
        rest, fragment = rest.split("#", 1)
    query = None
    if "?" in rest:
        rest, query = rest.split("?", 1)
    slash = rest.find("/")
    if slash >= 0:
        authority, path = rest[:slash], rest[slash:]
    else:
        authority, path = rest, ""

    userinfo = None
    if "@" in authority:
        userinfo, authority = authority.rsplit("@", 1)
    port = None
    if ":" in authority:
        hostpart, portpart = authority.rsplit(":", 1)
        if not portpart.isdigit():
            raise MalformedUrl(f"invalid port {portpart!r}")
        port = int(portpart)
        if port > 65535:
            raise MalformedUrl(f"port {port} out of range")
        authority = hostpart
    host, registrable = _parse_host(authority)
    return UrlParts(
        scheme=scheme,
        host=host,
        registrable_domain=registrable,
        path=path,
        userinfo=userinfo,
        port=port,
        query=query,
        fragment=fragment,
        raw=raw,
    )


def serialize_url(parts: UrlParts) -> str:
    """Canonical string form; parse_url(serialize_url(p)) == p."""
    out = [parts.scheme, "://"]
    if parts.userinfo is not None:
        out += [parts.userinfo, "@"]
    out.append(parts.host_str)
    if parts.port is not None:
        out.append(f":{parts.port}")
    out.append(parts.path)
    if parts.query is not None:
        out += ["?", parts.query]
    if parts.fragment is not None:
        out += ["#", parts.fragment]
    return "".join(out)


def parse_email_address(text: str) -> EmailAddress:
    if not text or "@" not in text:
        raise MalformedAddress(f"not an address: {text!r}")
    local, domain = text.rsplit("@", 1)
    if not local:
        raise MalformedAddress(f"empty local part in {text!r}")
    host, registrable = _parse_host(domain)
    return EmailAddress(local=local, host=host, registrable_domain=registrable)


def dehomoglyph(text: str) -> str:
    """Map look-alike character sequences back to their genuine forms."""
    for fake in _HOMOGLYPH_ORDER:
        if fake in text:
            text = text.replace(fake, HOMOGLYPHS[fake])
    return text


def item_digest(*parts: object) -> str:
    """Stable item identifier from generation inputs."""
    blob = json.dumps([str(p) for p in parts], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
