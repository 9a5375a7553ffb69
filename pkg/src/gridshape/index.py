"""Descriptor databases: build from a directory of shape images, persist
to a text index file (.gsx) and load it back.

Class labels follow the MPEG-7 file naming convention: everything before
the last hyphen of the stem ("apple-12.png" -> "apple").
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import descriptor as desc
from .contour_signature import DEFAULT_BINS
from .descriptor import CompositeDescriptor
from .errors import CorruptIndexError, EmptyIndexError, GridShapeError
from .labeledgrid import GridConfig
from .raster import largest_component, load_image

logger = logging.getLogger(__name__)

SUPPORTED_SUFFIXES = {".png", ".pgm", ".bmp"}
_HEADER_PREFIX = "gridshape-index"


@dataclass(eq=False)
class ShapeIndex:
    entries: list  # CompositeDescriptor, sorted by shape_id
    n: int
    tau: float
    m: int
    exclude_center: bool = False
    # provenance only; not persisted and not part of identity
    source_manifest: list = field(default_factory=list, compare=False)

    @property
    def fingerprint(self) -> tuple:
        return (self.n, self.tau, self.m)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, ShapeIndex):
            return NotImplemented
        return (
            self.fingerprint == other.fingerprint
            and self.exclude_center == other.exclude_center
            and self.entries == other.entries
        )


def class_from_filename(name: str) -> str:
    """Class label encoded in an MPEG-7 style file name."""
    stem = Path(name).stem
    head, sep, _ = stem.rpartition("-")
    return head if sep else stem


def _unique_id(stem: str, taken: set) -> str:
    if stem not in taken:
        return stem
    i = 1
    while f"{stem}-dup{i}" in taken:
        i += 1
    return f"{stem}-dup{i}"


def build_index(
    directory,
    cfg: GridConfig = GridConfig(),
    m_bins: int = DEFAULT_BINS,
    threshold: float = 0.5,
    invert: bool = False,
    exclude_center: bool = False,
) -> ShapeIndex:
    """Extract a descriptor for every supported raster in a directory.

    Files that fail extraction are skipped with a warning and recorded in
    the manifest; zero successes raise EmptyIndexError. Output is
    deterministic for identical directory contents.
    """
    directory = Path(directory)
    files = sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in SUPPORTED_SUFFIXES
    )
    entries = []
    manifest = []
    taken = set()
    for path in files:
        shape_id = _unique_id(path.stem, taken)
        if shape_id != path.stem:
            logger.warning("duplicate shape id %r: using %r for %s",
                           path.stem, shape_id, path.name)
        try:
            img = largest_component(load_image(path, threshold=threshold,
                                               invert=invert))
            d = desc.extract(
                img, cfg, m_bins,
                shape_id=shape_id,
                class_label=class_from_filename(path.name),
                exclude_center=exclude_center,
            )
        except (GridShapeError, OSError) as exc:
            logger.warning("skipping %s: %s", path.name, exc)
            manifest.append((path.stem, path.name, f"failed: {exc}"))
            continue
        taken.add(shape_id)
        entries.append(d)
        manifest.append((shape_id, path.name, "ok"))
    if not entries:
        raise EmptyIndexError(f"no usable shapes in {directory}")
    entries.sort(key=lambda d: d.shape_id)
    return ShapeIndex(
        entries=entries,
        n=cfg.n,
        tau=cfg.tau,
        m=m_bins,
        exclude_center=exclude_center,
        source_manifest=manifest,
    )


def from_entries(entries, exclude_center: bool = False) -> ShapeIndex:
    """Assemble an index from already-extracted descriptors."""
    if not entries:
        raise EmptyIndexError("no descriptors given")
    first = entries[0].fingerprint
    for d in entries:
        if d.fingerprint != first:
            raise CorruptIndexError(
                f"mixed fingerprints: {first} vs {d.fingerprint}"
            )
    ordered = sorted(entries, key=lambda d: d.shape_id)
    return ShapeIndex(entries=ordered, n=first[0], tau=first[1], m=first[2],
                      exclude_center=exclude_center)


def dumps_index(ix: ShapeIndex) -> str:
    header = (
        f"{_HEADER_PREFIX} n={ix.n} tau={desc.format_float(ix.tau)} "
        f"m={ix.m} entries={len(ix.entries)} "
        f"exclude_center={int(ix.exclude_center)}"
    )
    records = [desc.serialize(d) for d in ix.entries]
    return header + "\n" + "---\n".join(records)


def save_index(ix: ShapeIndex, path) -> None:
    Path(path).write_text(dumps_index(ix), encoding="utf-8")


def loads_index(text: str) -> ShapeIndex:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_HEADER_PREFIX):
        raise CorruptIndexError("missing header")
    header = {}
    for token in lines[0].split()[1:]:
        key, _, value = token.partition("=")
        header[key] = value
    try:
        n = int(header["n"])
        tau = float(header["tau"])
        m = int(header["m"])
        count = int(header["entries"])
        exclude_center = bool(int(header.get("exclude_center", "0")))
    except (KeyError, ValueError) as exc:
        raise CorruptIndexError(f"bad header: {lines[0]!r}") from exc

    entries = []
    block: list[str] = []
    block_start = 2

    def close_block(lineno):
        if not any(ln.strip() for ln in block):
            raise CorruptIndexError(f"empty record before line {lineno}")
        entries.append(desc.parse("\n".join(block), first_line=block_start))

    for lineno, line in enumerate(lines[1:], start=2):
        if line.strip() == "---":
            close_block(lineno)
            block = []
            block_start = lineno + 1
        else:
            block.append(line)
    if any(ln.strip() for ln in block):
        close_block(len(lines) + 1)

    if len(entries) != count:
        raise CorruptIndexError(
            f"header promises {count} entries, found {len(entries)}"
        )
    fingerprint = (n, tau, m)
    for d in entries:
        if d.fingerprint != fingerprint:
            raise CorruptIndexError(
                f"record {d.shape_id!r} fingerprint {d.fingerprint} "
                f"conflicts with index {fingerprint}"
            )
    entries.sort(key=lambda d: d.shape_id)
    return ShapeIndex(entries=entries, n=n, tau=tau, m=m,
                      exclude_center=exclude_center)


def load_index(path) -> ShapeIndex:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorruptIndexError(f"cannot read index {path}: {exc}") from exc
    return loads_index(text)
