"""Loading, windowing and labelling of EEG recordings.

Supports the plain-text single-channel segment format (one sample per
line, 173.61 Hz) and generic multi-channel CSV. Recordings are cut into
fixed-duration, non-overlapping frames; frames from several recording
pools are then assembled into labelled classification cases.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, EmptyInputError, FormatError, ParameterError

BONN_FS = 173.61
# segment filename prefix -> class tag of the public Bonn distribution
BONN_PREFIX_TAGS = {"Z": "A", "O": "B", "N": "C", "F": "D", "S": "E"}


@dataclass(frozen=True)
class Recording:
    """One continuous single-channel recording (samples in microvolt)."""

    samples: np.ndarray
    fs: float
    source_id: str
    class_tag: str

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.size == 0:
            raise EmptyInputError(f"recording {self.source_id!r} has no samples")
        if not self.fs > 0:
            raise ParameterError(f"sampling rate must be positive, got {self.fs}")
        if not np.all(np.isfinite(samples)):
            raise FormatError(f"recording {self.source_id!r} contains non-finite samples")


@dataclass(frozen=True)
class SignalFrame:
    """A fixed-length window cut from a recording."""

    samples: np.ndarray
    fs: float
    source_id: str
    frame_index: int
    label: int = -1

    @property
    def frame_id(self) -> str:
        return f"{self.source_id}:{self.frame_index}"

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))


@dataclass(frozen=True)
class CaseSpec:
    """A classification case: ordered groups of class tags, one label each."""

    name: str
    class_groups: tuple[tuple[int, frozenset[str]], ...]

    def __post_init__(self):
        if len(self.class_groups) < 2:
            raise ParameterError(f"case {self.name!r} needs at least 2 groups")
        seen: set[str] = set()
        for _, tags in self.class_groups:
            overlap = seen & tags
            if overlap:
                raise ParameterError(f"case {self.name!r}: tags {sorted(overlap)} appear in several groups")
            seen |= tags

    @property
    def n_classes(self) -> int:
        return len(self.class_groups)


def parse_case_name(name: str) -> CaseSpec:
    """Build a CaseSpec from a hyphenated tag-group name, e.g. ``AB-CD-E``."""
    parts = [p for p in name.strip().split("-") if p]
    if len(parts) < 2:
        raise ConfigurationError(f"case name {name!r} must contain at least two '-'-separated groups")
    groups = tuple((label, frozenset(part.upper())) for label, part in enumerate(parts))
    return CaseSpec(name=name, class_groups=groups)


#: The six standard two/three-way cases on tag pools A..E.
STANDARD_CASES = ("A-E", "B-E", "C-E", "D-E", "ABCD-E", "AB-CD-E")


def case_by_name(name: str) -> CaseSpec:
    """Resolve a case name (standard or user-written group syntax)."""
    try:
        return parse_case_name(name)
    except ParameterError as exc:
        raise ConfigurationError(str(exc)) from exc


def load_bonn_segment(path: str | Path, class_tag: str | None = None) -> Recording:
    """Load a plain-text segment: one numeric sample per line, 173.61 Hz.

    The class tag is inferred from the filename prefix (Z/O/N/F/S ->
    A/B/C/D/E) unless given explicitly.
    """
    path = Path(path)
    values: list[float] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            for token in line.split():
                try:
                    values.append(float(token))
                except ValueError:
                    raise FormatError(f"{path}: line {lineno}: unparsable token {token!r}") from None
    if not values:
        raise EmptyInputError(f"{path}: file contains no samples")
    if class_tag is None:
        prefix = path.name[:1].upper()
        class_tag = BONN_PREFIX_TAGS.get(prefix)
        if class_tag is None:
            raise FormatError(
                f"{path}: cannot infer class tag from prefix {prefix!r}; pass class_tag explicitly"
            )
    return Recording(samples=np.asarray(values), fs=BONN_FS, source_id=path.stem, class_tag=class_tag)


def load_csv_multichannel(path: str | Path, fs: float, channel: int, class_tag: str = "X") -> Recording:
    """Load one channel of a numeric CSV file (optional header auto-detected)."""
    path = Path(path)
    if not fs > 0:
        raise ParameterError(f"sampling rate must be positive, got {fs}")
    rows: list[list[str]] = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise EmptyInputError(f"{path}: file contains no rows")
    start = 0
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        start = 1  # non-numeric first row is a header
    if start == len(rows):
        raise EmptyInputError(f"{path}: file contains a header but no data rows")
    n_cols = len(rows[start])
    if not 0 <= channel < n_cols:
        raise IndexError(f"{path}: channel {channel} out of range for {n_cols} columns")
    values = np.empty(len(rows) - start, dtype=np.float64)
    for i, row in enumerate(rows[start:], start=start):
        try:
            values[i - start] = float(row[channel])
        except (ValueError, IndexError):
            raise FormatError(f"{path}: line {i + 1}: non-numeric or missing cell in column {channel}") from None
    return Recording(samples=values, fs=fs, source_id=path.stem, class_tag=class_tag)


def window(rec: Recording, seconds: float) -> list[SignalFrame]:
    """Cut a recording into consecutive non-overlapping frames.

    Frame length is ``floor(seconds * fs)``; a trailing remainder shorter
    than one frame is discarded. A window longer than the recording yields
    an empty list.
    """
    if not seconds > 0:
        raise ParameterError(f"window length must be positive, got {seconds}")
    frame_len = math.floor(seconds * rec.fs)
    if frame_len < 2:
        raise ParameterError(f"window of {seconds} s at {rec.fs} Hz gives frame length {frame_len} < 2")
    n_frames = rec.samples.size // frame_len
    return [
        SignalFrame(
            samples=rec.samples[k * frame_len:(k + 1) * frame_len],
            fs=rec.fs,
            source_id=rec.source_id,
            frame_index=k,
        )
        for k in range(n_frames)
    ]


def assemble_case(
    pools: Mapping[str, Sequence[SignalFrame]], case: CaseSpec
) -> list[SignalFrame]:
    """Label and collect the frames a classification case refers to.

    Every frame gets the integer label of its tag group; output is sorted
    by (source_id, frame_index) so repeated runs are identical.
    """
    available = set(pools)
    for _, tags in case.class_groups:
        missing = tags - available
        if missing:
            raise ConfigurationError(f"case {case.name!r}: no frame pool for tags {sorted(missing)}")
    labelled: list[SignalFrame] = []
    for label, tags in case.class_groups:
        for tag in sorted(tags):
            labelled.extend(dataclasses.replace(f, label=label) for f in pools[tag])
    labelled.sort(key=lambda f: (f.source_id, f.frame_index))
    return labelled
