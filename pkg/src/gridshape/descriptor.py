"""Composite shape descriptor: grid probabilities + centroid distance
signature + global statistics, with a line-oriented text serialization.

Record format (UTF-8, one `key value` pair per line):

    id <shape id>
    class <label, empty when unknown>
    n <grid side>
    tau <interior threshold>
    m <signature bins>
    grid.interior <comma-separated decimals>
    grid.boundary <comma-separated decimals>
    cdf <comma-separated decimals>
    globals <eccentricity,circularity,aspect_ratio,extent,solidity>

Floats are written with 9 significant digits; re-parsing a serialized
record is a fixed point, so parse(serialize(d)) round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .contour_signature import DEFAULT_BINS, CdfSignature, cdf_from_grid
from .errors import DescriptorParseError, ValidationError
from .labeledgrid import GridConfig, build_grid, track_probabilities, GridDescriptor
from .moments import GlobalFeatures, compute_moments, disambiguate_orientation, global_features
from .raster import BinaryImage, trace_contour

_FIELD_ORDER = ("id", "class", "n", "tau", "m",
                "grid.interior", "grid.boundary", "cdf", "globals")


@dataclass(eq=False)
class CompositeDescriptor:
    shape_id: str
    class_label: Optional[str]
    n: int
    tau: float
    m: int
    grid: GridDescriptor
    cdf: CdfSignature
    global_features: GlobalFeatures

    @property
    def fingerprint(self) -> tuple:
        return (self.n, self.tau, self.m)

    def __eq__(self, other):
        if not isinstance(other, CompositeDescriptor):
            return NotImplemented
        return (
            self.shape_id == other.shape_id
            and self.class_label == other.class_label
            and self.fingerprint == other.fingerprint
            and self.grid == other.grid
            and self.cdf == other.cdf
            and self.global_features == other.global_features
        )


def extract(
    img: BinaryImage,
    cfg: GridConfig = GridConfig(),
    m_bins: int = DEFAULT_BINS,
    shape_id: str = "",
    class_label: Optional[str] = None,
    exclude_center: bool = False,
) -> CompositeDescriptor:
    """Run the full feature pipeline on a binarized single-component image."""
    mom = compute_moments(img)
    angle = disambiguate_orientation(img, mom)
    grid = build_grid(img, mom, angle, cfg)
    contour = trace_contour(img)
    return CompositeDescriptor(
        shape_id=shape_id,
        class_label=class_label,
        n=cfg.n,
        tau=cfg.tau,
        m=m_bins,
        grid=track_probabilities(grid, exclude_center=exclude_center),
        cdf=cdf_from_grid(grid, m_bins),
        global_features=global_features(img, mom, contour),
    )


def format_float(x: float) -> str:
    return f"{x:.9g}"


def _format_vector(values) -> str:
    return ",".join(format_float(float(v)) for v in values)


def serialize(d: CompositeDescriptor) -> str:
    lines = [
        f"id {d.shape_id}",
        f"class {d.class_label}" if d.class_label is not None else "class",
        f"n {d.n}",
        f"tau {format_float(d.tau)}",
        f"m {d.m}",
        f"grid.interior {_format_vector(d.grid.interior_probs)}",
        f"grid.boundary {_format_vector(d.grid.boundary_probs)}",
        f"cdf {_format_vector(d.cdf.bins)}",
        f"globals {_format_vector(d.global_features.as_vector())}",
    ]
    return "\n".join(lines) + "\n"


def _parse_vector(text: str, field: str, lineno: int) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",")], dtype=np.float64)
    except ValueError as exc:
        raise DescriptorParseError(
            f"bad decimal in field {field}: {exc}", line=lineno, field=field
        ) from exc


def parse(text: str, first_line: int = 1) -> CompositeDescriptor:
    """Parse one serialized record; raises DescriptorParseError naming the
    offending line and field."""
    fields = {}
    linenos = {}
    for offset, raw in enumerate(text.splitlines()):
        line = raw.rstrip()
        if not line.strip():
            continue
        key, _, value = line.partition(" ")
        lineno = first_line + offset
        if key in fields:
            raise DescriptorParseError(f"duplicate field {key}", line=lineno, field=key)
        fields[key] = value
        linenos[key] = lineno

    for key in _FIELD_ORDER:
        if key not in fields:
            raise DescriptorParseError(f"missing field {key}", field=key)

    def scalar(key, conv):
        try:
            return conv(fields[key])
        except ValueError as exc:
            raise DescriptorParseError(
                f"bad value for field {key}: {fields[key]!r}",
                line=linenos[key], field=key,
            ) from exc

    n = scalar("n", int)
    tau = scalar("tau", float)
    m = scalar("m", int)
    interior = _parse_vector(fields["grid.interior"], "grid.interior",
                             linenos["grid.interior"])
    boundary = _parse_vector(fields["grid.boundary"], "grid.boundary",
                             linenos["grid.boundary"])
    cdf = _parse_vector(fields["cdf"], "cdf", linenos["cdf"])
    stats = _parse_vector(fields["globals"], "globals", linenos["globals"])
    if len(stats) != 5:
        raise DescriptorParseError(
            f"field globals needs 5 values, got {len(stats)}",
            line=linenos["globals"], field="globals",
        )
    return CompositeDescriptor(
        shape_id=fields["id"],
        class_label=fields["class"] or None,
        n=n,
        tau=tau,
        m=m,
        grid=GridDescriptor(interior_probs=interior, boundary_probs=boundary),
        cdf=CdfSignature(cdf),
        global_features=GlobalFeatures(*[float(v) for v in stats]),
    )


def validate(d: CompositeDescriptor) -> None:
    """Check structural and numeric invariants of a descriptor.

    Raises ValidationError; used after parsing hand-written or untrusted
    records (extraction output satisfies these by construction).
    """
    tracks = (d.n - 1) // 2 + 1
    if d.n < 3 or d.n % 2 == 0:
        raise ValidationError(f"grid size {d.n} must be odd and >= 3")
    if not 0.0 < d.tau <= 1.0:
        raise ValidationError(f"interior threshold {d.tau} out of (0, 1]")
    if len(d.grid.interior_probs) != tracks or len(d.grid.boundary_probs) != tracks:
        raise ValidationError(
            f"grid vectors must have {tracks} tracks for n={d.n}"
        )
    if len(d.cdf.bins) != d.m:
        raise ValidationError(
            f"cdf has {len(d.cdf.bins)} bins, fingerprint says {d.m}"
        )
    for name, vec in (("grid.interior", d.grid.interior_probs),
                      ("grid.boundary", d.grid.boundary_probs)):
        if (vec < 0).any() or (vec > 1).any():
            raise ValidationError(f"{name} values outside [0, 1]")
        total = float(vec.sum())
        if total != 0.0 and abs(total - 1.0) > 1e-9:
            raise ValidationError(f"{name} sums to {total}, expected 1 or 0")
    if (d.cdf.bins < 0).any() or (d.cdf.bins > 1).any():
        raise ValidationError("cdf values outside [0, 1]")
    g = d.global_features.as_vector()
    if not np.isfinite(g).all() or (g < 0).any():
        raise ValidationError("global features must be finite and nonnegative")
    if float(d.grid.interior_probs.sum()) == 0.0 and \
            float(d.grid.boundary_probs.sum()) == 0.0:
        raise ValidationError("degenerate descriptor: no labeled grid cells")
