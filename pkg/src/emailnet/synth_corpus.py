"""Synthetic disk images with a ground-truth manifest.

An image is a sequence of planted regions (mail stores, documentation author
lists, web-cache logon blobs, optionally gzip-compressed) separated by random
filler.  Filler is scrubbed so that the scanner finds exactly the planted
addresses: any accidental address loses its "@" and any accidental gzip
header loses its first byte.
"""
from __future__ import annotations

import gzip
import io
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import BinaryIO

import numpy as np

from . import kernels
from .extractor import GZIP_MAGIC, _utf16_units

__all__ = [
    "ArtifactBlock",
    "ConversationCluster",
    "LogonCache",
    "Manifest",
    "Occurrence",
    "ScenarioSpec",
    "SpecOverflowError",
    "generate_image",
    "write_image",
]

GUARD = b"\n"
FILLER_PIECE = 8 * 1024 * 1024
_FILLER_SCRUB_BYTE = 0x23  # '#'
_MAGIC_SCRUB_BYTE = 0x1E

_SYLLABLES = (
    "ka ri to ma ne lo sa vi du be ha jo mi ra te yu ze po li an el or is um "
    "ver tal mon dra gen bru kel fen lor mar nik pel quin ros sten tor vel wyn"
).split()
_WORDS = (
    "meeting report draft patent review budget invoice schedule update notes "
    "project client contract lunch weekend photos travel question answer plan "
    "summary agenda request offer quarter release server backup account access"
).split()
FREEMAIL = ["gmail.com", "yahoo.com", "hotmail.com", "outlook.com", "aol.com", "mail.com"]


class SpecOverflowError(ValueError):
    """Planted content does not fit into the requested image size."""


# -- scenario description ------------------------------------------------------

@dataclass
class ConversationCluster:
    id: str
    members: list[str]
    messages: int = 40
    owner: str | None = None
    gap_min: int = 5000
    gap_max: int = 9000
    zipf: float = 1.3
    cc_prob: float = 0.15
    # address copied on a fraction of messages (a server administrator's inbox)
    observer: str | None = None
    observer_prob: float = 0.0


@dataclass
class ArtifactBlock:
    id: str
    domain: str
    count: int
    kind: str = "software"  # or "repository"
    spacing: int = 256
    repeats: int = 3
    addresses: list[str] = field(default_factory=list)


@dataclass
class LogonCache:
    id: str
    aliases: list[str]
    repetitions: int = 30
    spacing_min: int = 200
    spacing_max: int = 800


@dataclass
class ScenarioSpec:
    image_size: int
    rng_seed: int
    clusters: list[ConversationCluster] = field(default_factory=list)
    artifacts: list[ArtifactBlock] = field(default_factory=list)
    logon_caches: list[LogonCache] = field(default_factory=list)
    compressed_fraction: float = 0.0
    # gzip layers around each compressed cluster
    compressed_depth: int = 1
    separation: int = 8192

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        d = dict(d)
        d["clusters"] = [ConversationCluster(**c) for c in d.get("clusters", [])]
        d["artifacts"] = [ArtifactBlock(**a) for a in d.get("artifacts", [])]
        d["logon_caches"] = [LogonCache(**l) for l in d.get("logon_caches", [])]
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


# -- manifest ------------------------------------------------------------------

@dataclass(frozen=True)
class Occurrence:
    path: str
    address: str
    group: str
    kind: str
    owner: bool = False


class Manifest:
    """Every planted address occurrence, one per line when serialised."""

    HEADER = "# path\taddress\tgroup\tkind\towner"

    def __init__(self, occurrences=(), comments=()):
        self.occurrences: list[Occurrence] = list(occurrences)
        self.comments: list[str] = list(comments)

    def __len__(self):
        return len(self.occurrences)

    def __eq__(self, other):
        return isinstance(other, Manifest) and self.occurrences == other.occurrences

    def to_text(self) -> str:
        lines = list(self.comments) + [self.HEADER]
        for o in self.occurrences:
            lines.append(f"{o.path}\t{o.address}\t{o.group}\t{o.kind}\t{int(o.owner)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Manifest":
        occ, comments = [], []
        for line in text.splitlines():
            if not line:
                continue
            if line.startswith("#"):
                if line != cls.HEADER:
                    comments.append(line)
                continue
            path, address, group, kind, owner = line.split("\t")
            occ.append(Occurrence(path, address, group, kind, owner == "1"))
        return cls(occ, comments)

    def expected_records(self) -> list[tuple[str, str]]:
        """(forensic path, address) pairs in scanner output order."""
        from .forensic_path import parse_forensic_path

        def key(o):
            p = parse_forensic_path(o.path)
            return (p.base, p.offset, o.address)

        return [(o.path, o.address) for o in sorted(self.occurrences, key=key)]

    def node_groups(self) -> dict[str, str]:
        """Address -> planted group; addresses planted in several groups map to "*"."""
        seen: dict[str, set[str]] = {}
        for o in self.occurrences:
            seen.setdefault(o.address, set()).add(o.group)
        return {a: (next(iter(g)) if len(g) == 1 else "*") for a, g in seen.items()}

    def group_kinds(self) -> dict[str, str]:
        return {o.group: o.kind for o in self.occurrences}

    def owners(self) -> set[str]:
        return {o.address for o in self.occurrences if o.owner}


# -- text helpers --------------------------------------------------------------

def _name(rng: random.Random) -> tuple[str, str]:
    first = "".join(rng.choice(_SYLLABLES) for _ in range(rng.randint(2, 3)))
    last = "".join(rng.choice(_SYLLABLES) for _ in range(rng.randint(2, 3)))
    return first, last


def _sentence(rng: random.Random, nbytes: int) -> bytes:
    words = []
    size = 0
    while size < nbytes:
        w = rng.choice(_WORDS)
        words.append(w)
        size += len(w) + 1
    return (" ".join(words))[:nbytes].encode("ascii")


def _display(address: str) -> str:
    local = address.split("@", 1)[0]
    return " ".join(p.capitalize() for p in local.replace("_", ".").split(".") if p)


class _Region:
    """Region bytes under construction, tracking where addresses were put."""

    def __init__(self, group: str, kind: str, owners=()):
        self.parts: list[bytes] = []
        self.size = 0
        self.hits: list[tuple[int, str, bool]] = []
        self.group = group
        self.kind = kind
        self.owners = set(owners)
        self.compressed = False

    def text(self, data: bytes | str) -> None:
        if isinstance(data, str):
            data = data.encode("ascii")
        self.parts.append(data)
        self.size += len(data)

    def address(self, addr: str) -> None:
        self.hits.append((self.size, addr.lower(), addr.lower() in self.owners))
        self.text(addr)

    def payload(self) -> bytes:
        return b"".join(self.parts)


def _zipf_choice(rng: random.Random, items: list[str], s: float) -> str:
    weights = [1.0 / (i + 1) ** s for i in range(len(items))]
    return rng.choices(items, weights=weights, k=1)[0]


def _build_cluster(c: ConversationCluster, rng: random.Random) -> _Region:
    owners = [c.owner] if c.owner else []
    region = _Region(c.id, "cluster", owners)
    contacts = [m for m in c.members if m != c.owner]
    for k in range(c.messages):
        if c.owner:
            first = _zipf_choice(rng, contacts, c.zipf)
            people = [c.owner, first]
        else:
            people = rng.sample(contacts, 2) if len(contacts) > 1 else list(contacts)
        if rng.random() < c.cc_prob and len(contacts) > 2:
            for _ in range(rng.randint(1, 2)):
                extra = _zipf_choice(rng, contacts, c.zipf)
                if extra not in people:
                    people.append(extra)
        if c.observer and rng.random() < c.observer_prob:
            people.append(c.observer)
        sender = people[0] if rng.random() < 0.5 else people[1]
        rest = [p for p in people if p != sender]
        region.text(f"\r\nFrom: {_display(sender)} <")
        region.address(sender)
        region.text(">\r\nTo: ")
        for i, p in enumerate(rest):
            if i:
                region.text(", ")
            region.text(f"{_display(p)} <")
            region.address(p)
            region.text(">")
        region.text(
            f"\r\nSubject: {_sentence(rng, rng.randint(10, 40)).decode()}\r\n"
            f"Date: Mon, {rng.randint(1, 28)} Nov 2009 {rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:00 -0800\r\n"
            f"Message-ID: <{rng.getrandbits(64):016x}.{k}.mail>\r\n\r\n"
        )
        region.text(_sentence(rng, rng.randint(200, 1500)))
        region.text(b"\r\n")
        if k + 1 < c.messages:
            region.text(b"\n" + _sentence(rng, rng.randint(c.gap_min, c.gap_max)) + b"\n")
    return region


def _artifact_addresses(block: ArtifactBlock, rng: random.Random, taken: set[str]) -> list[str]:
    if block.addresses:
        return [a.lower() for a in block.addresses]
    out = []
    while len(out) < block.count:
        first, last = _name(rng)
        domain = block.domain
        if block.kind == "repository" and out and rng.random() < 0.1:
            domain = rng.choice(FREEMAIL)
        addr = f"{first[0]}{last}@{domain}" if rng.random() < 0.5 else f"{first}.{last}@{domain}"
        if addr not in taken:
            taken.add(addr)
            out.append(addr)
    return out


def _build_software(block: ArtifactBlock, addrs: list[str], copy: int) -> _Region:
    region = _Region(block.id, "artifact")
    region.text(f"\nContributors to this release (copy {copy}):\n")
    for addr in addrs:
        line_start = region.size
        region.text(f"Author: {_display(addr)} <")
        region.address(addr)
        region.text(">")
        pad = block.spacing - (region.size - line_start) - 1
        region.text(b" " * max(pad, 0) + b"\n")
    return region


def _build_repository(block: ArtifactBlock, addrs: list[str], rng: random.Random) -> list[_Region]:
    core = [a for a in addrs if a.endswith("@" + block.domain)][:4] or addrs[:1]
    others = [a for a in addrs if a not in core]
    rng.shuffle(others)
    # a top-level maintainers file ties the core together; every other
    # document carries one core maintainer, so the block is one component
    docs: list[list[str]] = [list(core)]
    while others:
        take = [others.pop() for _ in range(min(len(others), rng.randint(1, 4)))]
        docs.append([_zipf_choice(rng, core, 1.0)] + take)
    for _ in range(max(1, block.repeats)):
        docs.append(rng.sample(core, min(len(core), 2)))
    regions = []
    for i, authors in enumerate(docs):
        region = _Region(block.id, "repository")
        pkg = "".join(rng.choice(_SYLLABLES) for _ in range(3))
        region.text(f"\n{pkg} ({rng.randint(0, 9)}.{rng.randint(0, 40)})\n\nAuthors:\n")
        for a in dict.fromkeys(authors):
            region.text(f"    {_display(a)} <")
            region.address(a)
            region.text(">\n")
        region.text(b"\n" + _sentence(rng, rng.randint(100, 600)) + b"\n")
        regions.append(region)
    return regions


def _build_logon(cache: LogonCache, rng: random.Random) -> _Region:
    region = _Region(cache.id, "logon")
    for r in range(cache.repetitions):
        region.text(f'\n{{"session":"{rng.getrandbits(48):012x}","accounts":[')
        for i, alias in enumerate(cache.aliases):
            if i:
                region.text(",")
            region.text('"')
            region.address(alias)
            region.text('"')
        region.text("]}\n")
        region.text(_sentence(rng, rng.randint(cache.spacing_min, cache.spacing_max)))
    return region


# -- scrubbing -----------------------------------------------------------------

def _accidental_hits(buf: bytes) -> list[int]:
    """Byte positions of the "@" of every match the scanner would report."""
    ats = []
    matches, _, _ = kernels.scan_lane(buf, 0, 0, True, True)
    for s, e in matches:
        ats.append(buf.index(b"@", s, e))
    for parity in (0, 1):
        units = _utf16_units(buf, parity)
        matches, _, _ = kernels.scan_lane(units, 0, 0, True, True)
        for s, e in matches:
            u = int(np.flatnonzero(units[s:e] == 64)[0]) + s
            ats.append(2 * u + parity)
    return ats


def _scrub(buf: bytearray) -> None:
    i = buf.find(GZIP_MAGIC)
    while i >= 0:
        buf[i] = _MAGIC_SCRUB_BYTE
        i = buf.find(GZIP_MAGIC, i + 1)
    while True:
        hits = _accidental_hits(bytes(buf))
        if not hits:
            return
        for at in hits:
            buf[at] = _FILLER_SCRUB_BYTE


def _clean_payload(payload: bytes) -> bool:
    return not _accidental_hits(payload) and payload.find(GZIP_MAGIC, 1) < 0


def _compress(plain: bytes) -> bytes:
    # mtime fixed for byte-identical output; pad until the compressed bytes
    # carry no stray address or gzip header of their own
    while True:
        data = gzip.compress(plain, compresslevel=9, mtime=0)
        if _clean_payload(data):
            return data
        plain += b" "


# -- assembly ------------------------------------------------------------------

def _regions(spec: ScenarioSpec, rng: random.Random) -> list[_Region]:
    regions: list[_Region] = []
    n_comp = round(spec.compressed_fraction * len(spec.clusters))
    compressed = set(rng.sample(range(len(spec.clusters)), n_comp)) if n_comp else set()
    for i, c in enumerate(spec.clusters):
        region = _build_cluster(c, rng)
        region.compressed = i in compressed
        regions.append(region)
    taken = {m for c in spec.clusters for m in c.members}
    for block in spec.artifacts:
        addrs = _artifact_addresses(block, rng, taken)
        if block.kind == "repository":
            regions.extend(_build_repository(block, addrs, rng))
        else:
            regions.extend(_build_software(block, addrs, k) for k in range(max(block.repeats, 1)))
    for cache in spec.logon_caches:
        regions.append(_build_logon(cache, rng))
    rng.shuffle(regions)
    return regions


def _layout(spec: ScenarioSpec, sizes: list[int], rng: random.Random) -> list[int]:
    """Filler length before each region, plus the trailing filler."""
    n = len(sizes)
    # each region is wrapped in two guard bytes
    content = sum(sizes) + 2 * n
    free = spec.image_size - content - n * spec.separation
    if free < 0:
        raise SpecOverflowError(
            f"planted content needs {content + n * spec.separation} bytes, image_size is {spec.image_size}"
        )
    cuts = sorted(rng.randint(0, free) for _ in range(n))
    extra = [b - a for a, b in zip([0] + cuts, cuts + [free])]
    gaps = [spec.separation + extra[i] for i in range(n)] + [extra[n]]
    if n == 0:
        gaps = [spec.image_size]
    return gaps


def _write_filler(out: BinaryIO, length: int, nprng: np.random.Generator) -> None:
    # pieces are separated by guard bytes so each can be scrubbed on its own
    while length > 0:
        piece = min(length, FILLER_PIECE)
        if length > piece:
            body = piece - 1
        else:
            body = piece
        buf = bytearray(nprng.integers(0, 256, size=body, dtype=np.uint8).tobytes())
        _scrub(buf)
        out.write(buf)
        if body < piece:
            out.write(GUARD)
        length -= piece


def write_image(spec: ScenarioSpec, out: BinaryIO) -> Manifest:
    """Stream the image for ``spec`` into ``out``; returns its manifest."""
    rng = random.Random(spec.rng_seed)
    nprng = np.random.Generator(np.random.PCG64(spec.rng_seed & (2**64 - 1)))
    regions = _regions(spec, rng)
    payloads = []
    for r in regions:
        data = r.payload()
        if r.compressed:
            for _ in range(spec.compressed_depth):
                data = _compress(data)
        payloads.append(data)
    gaps = _layout(spec, [len(p) for p in payloads], rng)

    occurrences = []
    pos = 0
    for region, payload, gap in zip(regions, payloads, gaps):
        _write_filler(out, gap, nprng)
        pos += gap
        out.write(GUARD)
        pos += 1
        for off, addr, owner in region.hits:
            if region.compressed:
                path = f"{pos}" + "-GZIP-0" * (spec.compressed_depth - 1) + f"-GZIP-{off}"
            else:
                path = str(pos + off)
            occurrences.append(Occurrence(path, addr, region.group, region.kind, owner))
        out.write(payload)
        pos += len(payload)
        out.write(GUARD)
        pos += 1
    _write_filler(out, gaps[-1] if regions else spec.image_size, nprng)
    comments = [f"# seed={spec.rng_seed} image_size={spec.image_size} regions={len(regions)}"]
    return Manifest(occurrences, comments)


def generate_image(spec: ScenarioSpec) -> tuple[bytes, Manifest]:
    buf = io.BytesIO()
    manifest = write_image(spec, buf)
    data = buf.getvalue()
    assert len(data) == spec.image_size
    return data, manifest


# -- canned scenarios ------------------------------------------------------------

class _AddressBook:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.taken: set[str] = set()

    def person(self, domain: str | None = None) -> str:
        while True:
            first, last = _name(self.rng)
            dom = domain or self.rng.choice(FREEMAIL + [self.org()])
            style = self.rng.randint(0, 2)
            local = (f"{first}.{last}", f"{first[0]}{last}", f"{first}{self.rng.randint(1, 99)}")[style]
            addr = f"{local}@{dom}"
            if addr not in self.taken:
                self.taken.add(addr)
                return addr

    def org(self) -> str:
        return "".join(self.rng.choice(_SYLLABLES) for _ in range(3)) + self.rng.choice([".com", ".org", ".net", ".biz"])

    def aliases(self, count: int) -> list[str]:
        first, last = _name(self.rng)
        variants = [
            f"{first}{last}", f"{first}.{last}", f"{first}{last}{self.rng.randint(1, 99)}",
            f"{first[0]}{last}", f"{first}_{last}", f"{first}{last}{self.rng.randint(100, 999)}",
            f"{first}.{last}{self.rng.randint(1, 9)}", f"{last}{first}",
        ]
        out = []
        domains = FREEMAIL[:]
        self.rng.shuffle(domains)
        for i in range(count):
            addr = f"{variants[i % len(variants)]}@{domains[i % len(domains)]}"
            if addr not in self.taken:
                self.taken.add(addr)
                out.append(addr)
        return out


def _fit(spec: ScenarioSpec, slack: int = 1 << 16) -> ScenarioSpec:
    """Set image_size to the planted content plus separations and slack."""
    rng = random.Random(spec.rng_seed)
    regions = _regions(spec, rng)
    total = 0
    for r in regions:
        data = r.payload()
        if r.compressed:
            for _ in range(spec.compressed_depth):
                data = _compress(data)
        total += len(data) + 2 + spec.separation
    spec.image_size = max(spec.image_size, total + slack)
    return spec


def communication_cluster(book: _AddressBook, cid: str, rng: random.Random, owner: str | None = None,
                          contacts: int | None = None, messages: int | None = None) -> ConversationCluster:
    owner = owner or book.person()
    n = contacts or rng.randint(10, 20)
    members = [owner] + [book.person() for _ in range(n)]
    return ConversationCluster(cid, members, messages=messages or rng.randint(50, 90), owner=owner)


def two_cluster_scenario(seed: int, separation: int = 4096, compressed_fraction: float = 0.0) -> ScenarioSpec:
    rng = random.Random(seed)
    book = _AddressBook(rng)
    clusters = [
        communication_cluster(book, f"c{i}", rng, contacts=rng.randint(3, 8), messages=rng.randint(8, 20))
        for i in range(2)
    ]
    for c in clusters:
        c.gap_min, c.gap_max = 200, 3000
    spec = ScenarioSpec(0, seed, clusters=clusters, compressed_fraction=compressed_fraction,
                        separation=separation)
    return _fit(spec, slack=rng.randint(0, 1 << 14))


def owner_drive_scenario(seed: int, groups: int = 3) -> ScenarioSpec:
    """One drive owner present in every conversation of several social groups."""
    rng = random.Random(seed)
    book = _AddressBook(rng)
    owner = book.person()
    clusters = [communication_cluster(book, f"c{i}", rng, owner=owner) for i in range(groups)]
    spec = ScenarioSpec(0, seed, clusters=clusters, compressed_fraction=0.34 if groups > 2 else 0.0)
    return _fit(spec)


def server_drive_scenario(seed: int, accounts: int) -> ScenarioSpec:
    """Mail server copies: one hub per user account plus an administrator inbox."""
    rng = random.Random(seed)
    book = _AddressBook(rng)
    admin = book.person()
    clusters = []
    for i in range(accounts):
        c = communication_cluster(book, f"acct{i}", rng, contacts=rng.randint(8, 14), messages=rng.randint(60, 90))
        c.observer = admin
        c.observer_prob = 0.25
        clusters.append(c)
    spec = ScenarioSpec(0, seed, clusters=clusters)
    return _fit(spec)


SHAPES = ("communication", "logon", "software", "repository")


def shape_scenario(seed: int, shape: str) -> ScenarioSpec:
    rng = random.Random(seed)
    book = _AddressBook(rng)
    spec = ScenarioSpec(0, seed)
    for i in range(rng.randint(1, 2)):
        if shape == "communication":
            spec.clusters.append(communication_cluster(book, f"c{i}", rng))
            spec.compressed_fraction = 0.5
        elif shape == "logon":
            spec.logon_caches.append(LogonCache(f"l{i}", book.aliases(rng.randint(4, 8)),
                                                repetitions=rng.randint(15, 40)))
        elif shape == "software":
            spec.artifacts.append(ArtifactBlock(f"a{i}", book.org(), rng.randint(22, 40), "software",
                                                spacing=rng.choice([128, 256, 512]), repeats=rng.randint(2, 4)))
        elif shape == "repository":
            spec.artifacts.append(ArtifactBlock(f"r{i}", "ubuntu.com", rng.randint(20, 40), "repository",
                                                repeats=rng.randint(3, 8)))
        else:
            raise ValueError(f"unknown shape {shape!r}")
    return _fit(spec)


def benchmark_suite(count: int = 40, seed: int = 0) -> list[tuple[str, ScenarioSpec]]:
    return [(SHAPES[i % 4], shape_scenario(seed * 1000 + i, SHAPES[i % 4])) for i in range(count)]


EXPECTED_LABEL = {
    "cluster": "USEFUL",
    "logon": "USEFUL",
    "artifact": "NOT_USEFUL",
    "repository": "NOT_USEFUL",
}


def component_truth(members, manifest: Manifest) -> str:
    """Expected triage label of a component, from the kinds of its planted nodes."""
    groups = manifest.node_groups()
    kinds = manifest.group_kinds()
    votes = Counter(EXPECTED_LABEL[kinds[groups[a]]] for a in members if groups.get(a, "*") != "*")
    if not votes:
        votes = Counter(
            EXPECTED_LABEL[o.kind] for o in manifest.occurrences if o.address in set(members)
        )
    return votes.most_common(1)[0][0]


def drive_scenario(seed: int, image_size: int, clusters: int = 40) -> ScenarioSpec:
    """A whole drive: an owner's mail, other mail stores, artifacts and logon caches."""
    rng = random.Random(seed)
    book = _AddressBook(rng)
    owner = book.person()
    spec = ScenarioSpec(image_size, seed, compressed_fraction=0.25)
    for i in range(clusters):
        spec.clusters.append(communication_cluster(book, f"c{i}", rng, owner=owner if i % 4 == 0 else None))
    for i in range(max(1, clusters // 4)):
        spec.artifacts.append(ArtifactBlock(f"a{i}", book.org(), rng.randint(20, 40), "software",
                                            spacing=rng.choice([128, 256]), repeats=rng.randint(2, 4)))
        spec.artifacts.append(ArtifactBlock(f"r{i}", "ubuntu.com", rng.randint(20, 40), "repository"))
        spec.logon_caches.append(LogonCache(f"l{i}", book.aliases(rng.randint(4, 8))))
    return spec
