"""Deterministic corpus synthesis and the heuristic trick oracle.

``generate_corpus`` is a pure function of (brand list, spec): the same
inputs always produce the same items in the same order, byte for byte in
the JSONL file format.  Fake items are built by applying one or two
weighted-sampled deception tricks to a brand's canonical material;
``classify`` re-detects tricks from the payload alone using per-trick
heuristic rules, which gives the round-trip soundness property the test
suite leans on (every injected tag is re-detected; legitimate items are
detected as clean).  The oracle may over-detect when composed mutations
co-trigger a second rule; that is allowed by design.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .model import (
    EMAIL_ONLY_TAGS,
    HOMOGLYPHS,
    HOST_IDENTITY_TAGS,
    EmailAddress,
    EmailItem,
    Payload,
    PhishItem,
    TrickTag,
    UrlParts,
    dehomoglyph,
    item_digest,
    parse_email_address,
    parse_url,
    serialize_url,
)
from .rng import SplitMix64, derive_seed

CORPUS_SCHEMA_VERSION = 1


class EmptyBrandList(ValueError):
    """generate_corpus needs at least one brand seed."""


class NoApplicableTrick(ValueError):
    """Fakes were requested but no applicable trick has positive weight."""


class NotApplicable(ValueError):
    """explain() called on a legitimate item."""


class CorpusFormatError(ValueError):
    """A corpus file line failed schema validation."""

    def __init__(self, message: str, line_no: int) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


# ---------------------------------------------------------------------------
# brand seeds


@dataclass(frozen=True)
class BrandSeed:
    """Canonical material a brand's legitimate items are drawn from."""

    brand: str
    canonical_url: UrlParts
    canonical_sender: EmailAddress
    path_templates: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.canonical_sender.registrable_domain != self.canonical_url.registrable_domain:
            raise ValueError(
                f"brand {self.brand!r}: sender domain differs from canonical URL domain"
            )

    @property
    def registrable(self) -> str:
        return self.canonical_url.registrable_domain

    @property
    def sld(self) -> str:
        return self.registrable.split(".", 1)[0]

    @property
    def suffix(self) -> str:
        return self.registrable.split(".", 1)[1]


def _brand_from_dict(d: dict) -> BrandSeed:
    return BrandSeed(
        brand=d["brand"],
        canonical_url=parse_url(d["canonical_url"]),
        canonical_sender=parse_email_address(d["canonical_sender"]),
        path_templates=tuple(d["path_templates"]),
    )


def load_brands(path: str | Path) -> list[BrandSeed]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return [_brand_from_dict(d) for d in data["brands"]]


def default_brands() -> list[BrandSeed]:
    with resources.files("phishgame.data").joinpath("brands.json").open(
        "r", encoding="utf-8"
    ) as fh:
        data = json.load(fh)
    return [_brand_from_dict(d) for d in data["brands"]]


# ---------------------------------------------------------------------------
# generation spec


DEFAULT_TRICK_WEIGHTS: dict[TrickTag, float] = {tag: 1.0 for tag in TrickTag}


@dataclass(frozen=True)
class GenerationSpec:
    """Parameters of one deterministic corpus draw."""

    seed: int
    count: int
    kind_mix: float = 0.3  # fraction of emails; the rest are URLs
    fake_fraction: float = 0.5
    trick_weights: dict[TrickTag, float] = field(
        default_factory=lambda: dict(DEFAULT_TRICK_WEIGHTS)
    )

    def __post_init__(self) -> None:
        if self.count <= 0:
            raise ValueError("count must be positive")
        if not (0.0 <= self.kind_mix <= 1.0):
            raise ValueError("kind_mix must be in [0, 1]")
        if not (0.0 <= self.fake_fraction <= 1.0):
            raise ValueError("fake_fraction must be in [0, 1]")
        if any(w < 0 for w in self.trick_weights.values()):
            raise ValueError("trick weights must be non-negative")


# ---------------------------------------------------------------------------
# fixed generation material

ATTACKER_DOMAINS = (
    "account-services-center.net",
    "secure-login-portal.com",
    "billing-update-desk.net",
    "customer-care-online.com",
    "webmail-access-point.net",
    "session-checkpoint.com",
)

HYPHEN_WORDS = (
    "secure", "support", "account", "billing", "update",
    "center", "team", "login", "service", "help",
)

ALT_SUFFIXES = ("net", "org", "co", "info", "biz", "io", "online")

NEUTRAL_SUBJECTS = (
    "Your monthly statement is available",
    "Your receipt is ready",
    "Your subscription renewal confirmation",
    "New features for your account",
    "Your weekly summary",
)

URGENT_SUBJECTS = (
    "URGENT: verify your account within 24 hours",
    "Your account will be closed — act now",
    "Final notice: account suspended, respond immediately",
    "Unusual activity detected — verify your account immediately",
)

URGENT_KEYWORDS = (
    "urgent",
    "immediately",
    "suspended",
    "verify your account",
    "act now",
    "within 24 hours",
    "final notice",
    "account will be closed",
    "unusual activity",
)

NEUTRAL_ANCHORS = ("View details", "Open your account page", "See your statement")

_LOWER = "abcdefghijklmnopqrstuvwxyz"


def levenshtein(a: str, b: str) -> int:
    """Iterative two-row edit distance (insert/delete/substitute)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


# ---------------------------------------------------------------------------
# explanations and hints

def explanation_for(tag: TrickTag, item_brand: str, payload: Payload) -> str:
    """Human-readable structural-cue text for one trick on one payload."""
    url = payload if isinstance(payload, UrlParts) else _primary_href(payload)
    brand_name = item_brand.capitalize()
    if tag is TrickTag.IP_ADDRESS_HOST:
        return (
            f"The host part of this address is the raw IP address {url.host_str} "
            f"instead of a named domain. Genuine {brand_name} pages live under a "
            "registered domain name."
        )
    if tag is TrickTag.USERINFO_DECEPTION:
        return (
            "Everything before the '@' in a web address is a username, not the site. "
            f"This address shows '{url.userinfo}' before the '@' but actually leads "
            f"to {url.registrable_domain}."
        )
    if tag is TrickTag.TYPOSQUAT:
        return (
            f"The registered domain here is '{url.registrable_domain}', one character "
            f"away from the genuine {brand_name} domain. Read the domain letter by letter."
        )
    if tag is TrickTag.HOMOGLYPH_SUBSTITUTION:
        return (
            f"The registered domain '{url.registrable_domain}' uses look-alike "
            f"characters to imitate the {brand_name} domain. Compare each character "
            "with the genuine spelling."
        )
    if tag is TrickTag.DECEPTIVE_SUBDOMAIN:
        return (
            f"The brand name appears only as a subdomain; the registered domain — "
            f"the part that identifies the owner — is '{url.registrable_domain}', "
            f"which is not controlled by {brand_name}."
        )
    if tag is TrickTag.HYPHENATED_BRAND:
        return (
            f"The registered domain '{url.registrable_domain}' merely contains the "
            f"brand name next to a hyphen; it is not the genuine {brand_name} domain."
        )
    if tag is TrickTag.WRONG_TLD:
        return (
            f"The name looks right but the ending is wrong: '{url.registrable_domain}' "
            f"is not the genuine {brand_name} domain. The top-level domain is part of "
            "the identity."
        )
    if tag is TrickTag.NO_HTTPS:
        return (
            "The address starts with plain http, so the connection is not encrypted. "
            "Genuine sign-in pages use https."
        )
    if tag is TrickTag.LINK_TEXT_MISMATCH:
        return (
            "The visible link text shows one address, but the underlying link points "
            f"to '{url.registrable_domain}'. Always check the real destination, not "
            "the text on top of it."
        )
    if tag is TrickTag.REPLY_TO_MISMATCH:
        assert isinstance(payload, EmailItem) and payload.reply_to is not None
        return (
            f"The reply-to domain '{payload.reply_to.registrable_domain}' differs from "
            f"the sender domain '{payload.from_address.registrable_domain}'. Replies "
            "would go to someone else entirely."
        )
    if tag is TrickTag.URGENT_LANGUAGE:
        return (
            "The message pressures you to act immediately. Urgency is a classic lure: "
            "slow down and check the sender and links through the official site."
        )
    raise ValueError(f"no explanation template for {tag}")


def _primary_href(email: EmailItem) -> UrlParts:
    if not email.body_links:
        raise ValueError("email has no body links")
    return email.body_links[0][1]


def explain(item: PhishItem) -> list[tuple[TrickTag, str]]:
    """One structural-cue explanation per trick on a fake item."""
    if item.legitimate:
        raise NotApplicable("legitimate items carry no tricks to explain")
    return [(tag, explanation_for(tag, item.brand, item.payload)) for tag in item.tricks]


# ---------------------------------------------------------------------------
# heuristic oracle

_TAG_ORDER = {tag: i for i, tag in enumerate(TrickTag)}


def _classify_url_parts(parts: UrlParts, brands: Sequence[BrandSeed]) -> set[TrickTag]:
    tags: set[TrickTag] = set()
    brand_regs = {b.registrable for b in brands}
    if parts.is_ip_host:
        tags.add(TrickTag.IP_ADDRESS_HOST)
    if parts.scheme == "http":
        tags.add(TrickTag.NO_HTTPS)
    if parts.userinfo and any(b.sld in parts.userinfo for b in brands):
        tags.add(TrickTag.USERINFO_DECEPTION)
    reg = parts.registrable_domain
    if not parts.is_ip_host and reg not in brand_regs:
        sld = reg.split(".", 1)[0]
        dehomo = dehomoglyph(reg)
        for b in brands:
            if levenshtein(reg, b.registrable) == 1:
                tags.add(TrickTag.TYPOSQUAT)
            if dehomo != reg and dehomo == b.registrable:
                tags.add(TrickTag.HOMOGLYPH_SUBSTITUTION)
            if sld == b.sld:
                tags.add(TrickTag.WRONG_TLD)
            if b.sld in sld.split("-") and sld != b.sld:
                tags.add(TrickTag.HYPHENATED_BRAND)
            if b.sld in parts.subdomain_labels:
                tags.add(TrickTag.DECEPTIVE_SUBDOMAIN)
    return tags


def _try_parse_anchor(text: str) -> Optional[UrlParts]:
    candidate = text.strip()
    if " " in candidate or "." not in candidate:
        return None
    if "://" not in candidate:
        candidate = "https://" + candidate
    try:
        return parse_url(candidate)
    except Exception:
        return None


def _classify_email(email: EmailItem, brands: Sequence[BrandSeed]) -> set[TrickTag]:
    tags: set[TrickTag] = set()
    if (
        email.reply_to is not None
        and email.reply_to.registrable_domain != email.from_address.registrable_domain
    ):
        tags.add(TrickTag.REPLY_TO_MISMATCH)
    subject = email.subject.lower()
    if any(kw in subject for kw in URGENT_KEYWORDS):
        tags.add(TrickTag.URGENT_LANGUAGE)
    for anchor, href in email.body_links:
        tags |= _classify_url_parts(href, brands)
        anchor_url = _try_parse_anchor(anchor)
        if anchor_url is not None and anchor_url.registrable_domain != href.registrable_domain:
            tags.add(TrickTag.LINK_TEXT_MISMATCH)
    return tags


def classify(
    payload: Payload, brands: Sequence[BrandSeed]
) -> tuple[str, list[TrickTag]]:
    """Detect trick tags heuristically; verdict is phishing iff any tag fires."""
    if isinstance(payload, UrlParts):
        tags = _classify_url_parts(payload, brands)
    elif isinstance(payload, EmailItem):
        tags = _classify_email(payload, brands)
    else:
        raise TypeError(f"cannot classify {type(payload).__name__}")
    ordered = sorted(tags, key=_TAG_ORDER.__getitem__)
    return ("phishing" if ordered else "legitimate", ordered)


# ---------------------------------------------------------------------------
# generation

def _applicable_tags(kind: str) -> frozenset[TrickTag]:
    if kind == "url":
        return frozenset(set(TrickTag) - EMAIL_ONLY_TAGS)
    return frozenset(TrickTag)


def _sample_tricks(
    rng: SplitMix64, kind: str, weights: dict[TrickTag, float]
) -> list[TrickTag]:
    applicable = [t for t in TrickTag if t in _applicable_tags(kind) and weights.get(t, 0) > 0]
    if not applicable:
        raise NoApplicableTrick(f"no applicable trick with positive weight for kind {kind!r}")
    first = rng.weighted_choice(applicable, [weights[t] for t in applicable])
    tricks = [first]
    if rng.random() < 0.5:
        remaining = [
            t
            for t in applicable
            if t is not first
            and not (t in HOST_IDENTITY_TAGS and first in HOST_IDENTITY_TAGS)
        ]
        if remaining:
            tricks.append(rng.weighted_choice(remaining, [weights[t] for t in remaining]))
    return sorted(tricks, key=_TAG_ORDER.__getitem__)


def _mutate_host_sld(host: tuple[str, ...], reg: str, new_sld: str, new_suffix: str | None = None) -> tuple[tuple[str, ...], str]:
    """Replace the registrable domain's first label (and optionally suffix)."""
    suffix = reg.split(".", 1)[1] if new_suffix is None else new_suffix
    n_reg = len(reg.split("."))
    prefix = host[:-n_reg]
    new_reg = f"{new_sld}.{suffix}"
    return prefix + tuple(new_reg.split(".")), new_reg


def _typosquat_sld(rng: SplitMix64, brand: BrandSeed, brands: Sequence[BrandSeed]) -> str:
    sld = brand.sld
    brand_regs = {b.registrable for b in brands}
    for _ in range(200):
        op = rng.choice(["substitute", "delete", "insert"])
        if op == "delete" and len(sld) <= 3:
            continue
        i = rng.randrange(len(sld))
        if op == "substitute":
            repl = rng.choice(_LOWER)
            if repl == sld[i]:
                continue
            cand = sld[:i] + repl + sld[i + 1:]
        elif op == "delete":
            cand = sld[:i] + sld[i + 1:]
        else:
            cand = sld[:i] + rng.choice(_LOWER) + sld[i:]
        if cand == sld or cand.startswith("-") or cand.endswith("-"):
            continue
        if f"{cand}.{brand.suffix}" in brand_regs:
            continue
        return cand
    raise RuntimeError(f"could not typosquat brand {brand.brand!r}")


def _apply_url_tricks(
    rng: SplitMix64,
    brand: BrandSeed,
    tricks: Sequence[TrickTag],
    brands: Sequence[BrandSeed],
) -> tuple[UrlParts, list[str]]:
    """Build a deceptive URL from the brand's canonical one."""
    base = brand.canonical_url
    path = rng.choice(brand.path_templates)
    host, reg = base.host, base.registrable_domain
    scheme = "https"
    userinfo = None
    params: list[str] = [path]

    # Phase 1: at most one host-identity trick rewrites host/registrable.
    host_trick = next((t for t in tricks if t in HOST_IDENTITY_TAGS), None)
    if host_trick is TrickTag.IP_ADDRESS_HOST:
        octets = (rng.randint(11, 223), rng.randint(0, 255), rng.randint(0, 255), rng.randint(1, 254))
        host = tuple(str(o) for o in octets)
        reg = ".".join(host)
        params.append(reg)
    elif host_trick is TrickTag.TYPOSQUAT:
        new_sld = _typosquat_sld(rng, brand, brands)
        host, reg = _mutate_host_sld(host, reg, new_sld)
        params.append(new_sld)
    elif host_trick is TrickTag.HOMOGLYPH_SUBSTITUTION:
        options = [k for k, v in HOMOGLYPHS.items() if v in brand.sld]
        fake = rng.choice(options)
        new_sld = brand.sld.replace(HOMOGLYPHS[fake], fake)
        host, reg = _mutate_host_sld(host, reg, new_sld)
        params.append(new_sld)
    elif host_trick is TrickTag.DECEPTIVE_SUBDOMAIN:
        attacker = rng.choice(ATTACKER_DOMAINS)
        style = rng.choice(["label", "full"])
        lead = (brand.sld,) if style == "label" else tuple(brand.registrable.split("."))
        host = lead + tuple(attacker.split("."))
        reg = attacker
        params.append(f"{style}:{attacker}")
    elif host_trick is TrickTag.HYPHENATED_BRAND:
        word = rng.choice(HYPHEN_WORDS)
        new_sld = rng.choice([f"{brand.sld}-{word}", f"{word}-{brand.sld}"])
        suffix = rng.choice([brand.suffix, "com", "net"])
        host, reg = _mutate_host_sld(
            ("www",) + tuple(brand.registrable.split(".")), brand.registrable, new_sld, suffix
        )
        params.append(new_sld + "." + suffix)
    elif host_trick is TrickTag.WRONG_TLD:
        suffix = rng.choice([s for s in ALT_SUFFIXES if s != brand.suffix])
        host, reg = _mutate_host_sld(host, reg, brand.sld, suffix)
        params.append(suffix)

    # Phase 2: decorating tricks that leave the (possibly mutated) host alone.
    for trick in tricks:
        if trick is TrickTag.NO_HTTPS:
            scheme = "http"
            params.append("http")
        elif trick is TrickTag.USERINFO_DECEPTION:
            userinfo = brand.registrable
            if host_trick is None:
                # brand-in-front-of-@ only deceives if the real host is foreign
                attacker = rng.choice(ATTACKER_DOMAINS)
                host = tuple(attacker.split("."))
                reg = attacker
                params.append(attacker)
        elif trick is host_trick or trick in HOST_IDENTITY_TAGS:
            continue
        elif trick in EMAIL_ONLY_TAGS:
            raise NoApplicableTrick(f"{trick} does not apply to a URL payload")

    parts = UrlParts(
        scheme=scheme,
        host=host,
        registrable_domain=reg,
        path=path,
        userinfo=userinfo,
    )
    parts = parse_url(serialize_url(parts))  # normalize raw + revalidate
    return parts, params


def _legit_url(rng: SplitMix64, brand: BrandSeed) -> tuple[UrlParts, list[str]]:
    path = rng.choice(brand.path_templates)
    base = brand.canonical_url
    parts = UrlParts(
        scheme="https",
        host=base.host,
        registrable_domain=base.registrable_domain,
        path=path,
    )
    parts = parse_url(serialize_url(parts))
    return parts, [path]


def _legit_email(rng: SplitMix64, brand: BrandSeed) -> tuple[EmailItem, list[str]]:
    url, params = _legit_url(rng, brand)
    anchor = rng.choice((serialize_url(url),) + NEUTRAL_ANCHORS)
    subject = rng.choice(NEUTRAL_SUBJECTS)
    email = EmailItem(
        display_name=brand.brand.capitalize(),
        from_address=brand.canonical_sender,
        subject=subject,
        body_links=((anchor, url),),
    )
    return email, params + [subject, anchor]


def _apply_email_tricks(
    rng: SplitMix64,
    brand: BrandSeed,
    tricks: Sequence[TrickTag],
    brands: Sequence[BrandSeed],
) -> tuple[EmailItem, list[str]]:
    url_tricks = [t for t in tricks if t not in EMAIL_ONLY_TAGS]
    params: list[str] = []
    if url_tricks:
        href, url_params = _apply_url_tricks(rng, brand, url_tricks, brands)
        params += url_params
    elif TrickTag.LINK_TEXT_MISMATCH in tricks:
        attacker = rng.choice(ATTACKER_DOMAINS)
        href = parse_url(f"https://{attacker}{rng.choice(brand.path_templates)}")
        params.append(attacker)
    else:
        href, url_params = _legit_url(rng, brand)
        params += url_params

    if TrickTag.LINK_TEXT_MISMATCH in tricks:
        if href.registrable_domain == brand.registrable:
            # combined tricks left the host genuine (e.g. NoHttps); the
            # mismatch needs a foreign destination behind the brand text
            attacker = rng.choice(ATTACKER_DOMAINS)
            href = parse_url(f"{href.scheme}://{attacker}{href.path}")
            params.append(attacker)
        anchor = serialize_url(brand.canonical_url) + rng.choice(brand.path_templates)
        params.append("link-text-mismatch")
    else:
        # honest anchor: the real destination or neutral prose
        anchor = rng.choice((serialize_url(href),) + NEUTRAL_ANCHORS)
    subject = rng.choice(NEUTRAL_SUBJECTS)
    urgency = False
    if TrickTag.URGENT_LANGUAGE in tricks:
        subject = rng.choice(URGENT_SUBJECTS)
        urgency = True
        params.append(subject)
    reply_to = None
    if TrickTag.REPLY_TO_MISMATCH in tricks:
        attacker = rng.choice(ATTACKER_DOMAINS)
        reply_to = parse_email_address(f"support@{attacker}")
        params.append(str(reply_to))
    email = EmailItem(
        display_name=brand.brand.capitalize(),
        from_address=brand.canonical_sender,
        subject=subject,
        body_links=((anchor, href),),
        reply_to=reply_to,
        urgency_flag=urgency,
    )
    return email, params


def generate_corpus(brands: Sequence[BrandSeed], spec: GenerationSpec) -> list[PhishItem]:
    """Synthesize exactly ``spec.count`` items, deterministically."""
    if not brands:
        raise EmptyBrandList("at least one brand seed is required")
    weights = {t: spec.trick_weights.get(t, 0.0) for t in TrickTag}
    if spec.fake_fraction > 0:
        if spec.kind_mix < 1.0 and not any(
            weights[t] > 0 for t in _applicable_tags("url")
        ):
            raise NoApplicableTrick("URL fakes requested but no URL-applicable trick has weight")
        if spec.kind_mix > 0.0 and not any(weights[t] > 0 for t in TrickTag):
            raise NoApplicableTrick("email fakes requested but all trick weights are zero")

    rng = SplitMix64(derive_seed(spec.seed, "corpus"))
    items: list[PhishItem] = []
    for i in range(spec.count):
        kind = "email" if rng.random() < spec.kind_mix else "url"
        fake = rng.random() < spec.fake_fraction
        brand = rng.choice(list(brands))
        if fake:
            tricks = tuple(_sample_tricks(rng, kind, weights))
            if kind == "url":
                payload, params = _apply_url_tricks(rng, brand, tricks, brands)
            else:
                payload, params = _apply_email_tricks(rng, brand, tricks, brands)
        else:
            tricks = ()
            payload, params = (
                _legit_url(rng, brand) if kind == "url" else _legit_email(rng, brand)
            )
        item_id = item_digest(
            spec.seed, i, brand.brand, kind, [t.value for t in tricks], params
        )
        explanations = tuple(
            (t, explanation_for(t, brand.brand, payload)) for t in tricks
        )
        items.append(
            PhishItem(
                item_id=item_id,
                kind=kind,
                payload=payload,
                legitimate=not fake,
                tricks=tricks,
                explanations=explanations,
                brand=brand.brand,
            )
        )
    return items


# ---------------------------------------------------------------------------
# JSONL corpus file format (schema v1, stable key order)


def url_to_dict(parts: UrlParts) -> dict:
    return {
        "type": "url",
        "scheme": parts.scheme,
        "userinfo": parts.userinfo,
        "host": list(parts.host),
        "registrable_domain": parts.registrable_domain,
        "port": parts.port,
        "path": parts.path,
        "query": parts.query,
        "fragment": parts.fragment,
        "raw": serialize_url(parts),
    }


def url_from_dict(d: dict) -> UrlParts:
    return UrlParts(
        scheme=d["scheme"],
        host=tuple(d["host"]),
        registrable_domain=d["registrable_domain"],
        path=d["path"],
        userinfo=d["userinfo"],
        port=d["port"],
        query=d["query"],
        fragment=d["fragment"],
        raw=d["raw"],
    )


def email_to_dict(email: EmailItem) -> dict:
    return {
        "type": "email",
        "display_name": email.display_name,
        "from": str(email.from_address),
        "reply_to": None if email.reply_to is None else str(email.reply_to),
        "subject": email.subject,
        "body_links": [[anchor, url_to_dict(href)] for anchor, href in email.body_links],
        "urgency_flag": email.urgency_flag,
    }


def email_from_dict(d: dict) -> EmailItem:
    return EmailItem(
        display_name=d["display_name"],
        from_address=parse_email_address(d["from"]),
        subject=d["subject"],
        body_links=tuple((a, url_from_dict(u)) for a, u in d["body_links"]),
        reply_to=None if d["reply_to"] is None else parse_email_address(d["reply_to"]),
        urgency_flag=d["urgency_flag"],
    )


def payload_to_dict(payload: Payload) -> dict:
    return url_to_dict(payload) if isinstance(payload, UrlParts) else email_to_dict(payload)


def payload_from_dict(d: dict) -> Payload:
    return url_from_dict(d) if d["type"] == "url" else email_from_dict(d)


def item_to_dict(item: PhishItem) -> dict:
    return {
        "v": CORPUS_SCHEMA_VERSION,
        "id": item.item_id,
        "kind": item.kind,
        "brand": item.brand,
        "legitimate": item.legitimate,
        "tricks": [t.value for t in item.tricks],
        "payload": payload_to_dict(item.payload),
        "explanations": [[t.value, text] for t, text in item.explanations],
    }


def item_from_dict(d: dict) -> PhishItem:
    return PhishItem(
        item_id=d["id"],
        kind=d["kind"],
        payload=payload_from_dict(d["payload"]),
        legitimate=d["legitimate"],
        tricks=tuple(TrickTag(t) for t in d["tricks"]),
        explanations=tuple((TrickTag(t), text) for t, text in d["explanations"]),
        brand=d["brand"],
    )


def dumps_item(item: PhishItem) -> str:
    return json.dumps(item_to_dict(item), ensure_ascii=False, separators=(",", ":"))


def write_corpus(items: Iterable[PhishItem], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for item in items:
            fh.write(dumps_item(item))
            fh.write("\n")


def read_corpus(path: str | Path) -> list[PhishItem]:
    items: list[PhishItem] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc}", line_no) from exc
            if d.get("v") != CORPUS_SCHEMA_VERSION:
                raise CorpusFormatError(
                    f"unsupported schema version {d.get('v')!r}", line_no
                )
            try:
                items.append(item_from_dict(d))
            except (KeyError, ValueError) as exc:
                raise CorpusFormatError(str(exc), line_no) from exc
    return items
