"""OEIS b-files: parsing, triangle matching, vendored fixtures and fetching.

A b-file is plain text with one ``index value`` pair per line.  Triangles
are stored row-major, so matching needs a :class:`Layout` saying which
generated row is the first b-file row, where each row starts in ``k`` and
how wide each row is.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .poly import Poly

ENDPOINT_ENV = "EULERREC_OEIS_ENDPOINT"
CACHE_ENV = "EULERREC_CACHE_DIR"
DEFAULT_ENDPOINT = "https://oeis.org"
_A_RE = re.compile(r"A\d{6}")


class BFileError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


class FetchError(OSError):
    pass


@dataclass(frozen=True)
class BFile:
    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.entries:
            raise BFileError("no entries")
        first = self.entries[0][0]
        for i, (idx, _) in enumerate(self.entries):
            if idx != first + i:
                raise BFileError(f"index {idx} breaks the run starting at {first}")

    @property
    def offset(self) -> int:
        return self.entries[0][0]

    @property
    def values(self) -> list[int]:
        return [v for _, v in self.entries]

    def __len__(self):
        return len(self.entries)


def parse_bfile(text: str) -> BFile:
    """Parse b-file text. Comments start with ``#``; blank lines are skipped."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BFileError(f"expected 'index value', got {raw!r}", lineno)
        try:
            idx, val = int(parts[0]), int(parts[1])
        except ValueError:
            raise BFileError(f"non-integer field in {raw!r}", lineno) from None
        if entries and idx != entries[-1][0] + 1:
            raise BFileError(f"index {idx} does not follow {entries[-1][0]}", lineno)
        entries.append((idx, val))
    return BFile(tuple(entries))


def serialize(bfile: BFile) -> str:
    return "".join(f"{i} {v}\n" for i, v in bfile.entries)


def bfile_from_values(values: Sequence[int], offset: int = 0) -> BFile:
    return BFile(tuple((offset + i, int(v)) for i, v in enumerate(values)))


@dataclass(frozen=True)
class Layout:
    """How generated rows map onto a flattened b-file.

    ``first_row`` is the index n of the generated row stored first,
    ``k_start`` the lowest power of v kept in each row, and ``width`` fixes
    the row length as ``width[0]*n + width[1]`` (padding with zeros); when it
    is None the row runs up to its degree.
    """
    first_row: int = 0
    k_start: int = 0
    width: Optional[tuple[int, int]] = None

    def flatten_row(self, n: int, row: Poly) -> list[int]:
        cs = list(row.coeffs)
        if self.width is None:
            hi = len(cs)
        else:
            hi = self.k_start + self.width[0] * n + self.width[1]
        cs = cs + [0] * max(0, hi - len(cs))
        out = cs[self.k_start:hi]
        for c in out:
            if getattr(c, "denominator", 1) != 1:
                raise ValueError(f"row {n} has a non-integer coefficient {c}")
        return [int(c) for c in out]


@dataclass(frozen=True)
class Mismatch:
    n: int
    k: int
    expected: int
    got: Optional[int]


@dataclass(frozen=True)
class TriangleMatch:
    a_number: str
    offset: int
    rows_matched: int
    terms_matched: int
    terms_total: int
    mismatch: Optional[Mismatch] = None

    @property
    def full(self) -> bool:
        return self.mismatch is None and self.terms_matched == self.terms_total

    def to_json(self) -> dict:
        return {
            "a_number": self.a_number,
            "offset": self.offset,
            "rows_matched": self.rows_matched,
            "terms_matched": self.terms_matched,
            "terms_total": self.terms_total,
            "full_match": self.full,
            "mismatch": None if self.mismatch is None else {
                "n": self.mismatch.n, "k": self.mismatch.k,
                "expected": str(self.mismatch.expected),
                "got": None if self.mismatch.got is None else str(self.mismatch.got),
            },
        }


def match_triangle(rows: Sequence[Poly], bfile: BFile, layout: Layout,
                   a_number: str = "", start: int = 0) -> TriangleMatch:
    """Longest exact prefix match of flattened ``rows`` (P_start, ...) against ``bfile``.

    If the b-file runs past the supplied rows, the first missing position is
    reported as a mismatch with ``got=None``.
    """
    expected = bfile.values
    pos = 0
    rows_matched = 0
    n = layout.first_row
    while pos < len(expected):
        if n - start >= len(rows) or n < start:
            k = layout.k_start
            return TriangleMatch(a_number, bfile.offset, rows_matched, pos, len(expected),
                                 Mismatch(n, k, expected[pos], None))
        flat = layout.flatten_row(n, rows[n - start])
        for j, got in enumerate(flat):
            if pos >= len(expected):
                # b-file ends mid-row; a partial last row is still a prefix match
                return TriangleMatch(a_number, bfile.offset, rows_matched, pos, len(expected))
            if got != expected[pos]:
                return TriangleMatch(a_number, bfile.offset, rows_matched, pos, len(expected),
                                     Mismatch(n, layout.k_start + j, expected[pos], got))
            pos += 1
        rows_matched += 1
        n += 1
    return TriangleMatch(a_number, bfile.offset, rows_matched, pos, len(expected))


def match_spec(spec, bfile: BFile, layout: Layout, a_number: str = "") -> TriangleMatch:
    """Generate rows of ``spec`` lazily until the b-file is covered, then match."""
    from .recurrence import iter_rows

    rows: list = []
    covered = 0
    for n, row in iter_rows(spec):
        rows.append(row)
        if n >= layout.first_row:
            covered += len(layout.flatten_row(n, row))
            if covered >= len(bfile):
                break
    return match_triangle(rows, bfile, layout, a_number, start=spec.start)


# -- fixtures ---------------------------------------------------------------

@dataclass(frozen=True)
class FixtureInfo:
    spec: str
    layout: Layout


#: Which builtin spec and layout each vendored A-number is compared with.
REGISTRY: dict[str, FixtureInfo] = {
    "A008292": FixtureInfo("eulerian", Layout(first_row=1)),
    "A173018": FixtureInfo("eulerian", Layout(first_row=0, width=(1, 1))),
    "A060187": FixtureInfo("A060187", Layout(first_row=0)),
    "A008517": FixtureInfo("A008517", Layout(first_row=1, k_start=1)),
    "A008290": FixtureInfo("A008290", Layout(first_row=0)),
    "A039598": FixtureInfo("A039598", Layout(first_row=0)),
    "A193229": FixtureInfo("A193229", Layout(first_row=0)),
    "A065600": FixtureInfo("A065600", Layout(first_row=0)),
    "A091441": FixtureInfo("A091441", Layout(first_row=0)),
    "A202550": FixtureInfo("A202550", Layout(first_row=0)),
    "A244312": FixtureInfo("A244312", Layout(first_row=1, k_start=1)),
}


def check_a_number(a_number: str) -> str:
    a = a_number.strip().upper()
    if not _A_RE.fullmatch(a):
        raise ValueError(f"malformed A-number {a_number!r}")
    return a


def _fixture_dir():
    return resources.files("eulerrec") / "data" / "oeis"


def fixture_checksums() -> dict[str, str]:
    return json.loads((_fixture_dir() / "checksums.json").read_text(encoding="utf-8"))


def load_fixture(a_number: str, verify: bool = True) -> BFile:
    a = check_a_number(a_number)
    name = f"b{a[1:]}.txt"
    path = _fixture_dir() / name
    if not path.is_file():
        raise FileNotFoundError(f"no vendored fixture for {a}")
    data = path.read_bytes()
    if verify:
        want = fixture_checksums().get(name)
        if want is None or hashlib.sha256(data).hexdigest() != want:
            raise BFileError(f"checksum mismatch for vendored {name}")
    return parse_bfile(data.decode("utf-8"))


def fixture_ids() -> list[str]:
    return sorted("A" + p[1:7] for p in fixture_checksums())


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fetch_bfile(a_number: str, endpoint: Optional[str] = None,
                cache_dir: Optional[os.PathLike] = None, offline: bool = False,
                timeout: float = 30.0) -> BFile:
    """Return the b-file for ``a_number`` from cache, or download and cache it.

    Offline mode reads the cache only.  Vendored fixtures are never written.
    """
    a = check_a_number(a_number)
    name = f"b{a[1:]}.txt"
    cache = Path(cache_dir or os.environ.get(CACHE_ENV) or "cache")
    path = cache / name
    if path.is_file():
        return parse_bfile(path.read_text(encoding="utf-8"))
    if offline:
        raise FetchError(f"{a}: not in cache {cache} and offline mode is set")
    base = (endpoint or os.environ.get(ENDPOINT_ENV) or DEFAULT_ENDPOINT).rstrip("/")
    url = f"{base}/{a}/{name}"
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            if resp.status != 200:
                raise FetchError(f"{url}: HTTP {resp.status}")
            data = resp.read()
    except urllib.error.HTTPError as exc:
        raise FetchError(f"{url}: HTTP {exc.code}") from exc
    except urllib.error.URLError as exc:
        raise FetchError(f"{url}: {exc.reason}") from exc
    bfile = parse_bfile(data.decode("utf-8"))
    _atomic_write(path, data)
    return bfile


def resolve_bfile(a_number: str, offline: bool = False, endpoint: Optional[str] = None,
                  cache_dir: Optional[os.PathLike] = None) -> BFile:
    """Vendored fixture first, then the cache or the network."""
    try:
        return load_fixture(a_number)
    except FileNotFoundError:
        return fetch_bfile(a_number, endpoint=endpoint, cache_dir=cache_dir, offline=offline)
