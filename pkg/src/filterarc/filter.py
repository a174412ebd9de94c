"""Filter of prohibited (constraint violation, Lagrangian) pairs."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

__all__ = ["FilterEntry", "Filter", "filter_init", "filter_acceptable", "filter_add", "in_region"]


@dataclass(frozen=True)
class FilterEntry:
    h: float
    l: float


def _check_pair(h, l):
    if not (math.isfinite(h) and math.isfinite(l)):
        raise ValueError(f"filter pair must be finite, got ({h}, {l})")
    if h < 0:
        raise ValueError(f"constraint violation must be non-negative, got {h}")


@dataclass
class Filter:
    """Prohibited region ``{h >= h_max}`` united with one corner per entry.

    A pair ``(h, l)`` lies in the corner of entry ``(h_j, l_j)`` when
    ``h > (1 - gamma_h) h_j`` and ``l > l_j - gamma_l h_j``.
    """

    h_max: float
    gamma_h: float = 1e-5
    gamma_l: float = 1e-5
    entries: list = field(default_factory=list)
    prune: bool = True

    def __post_init__(self):
        if not (self.h_max > 0 and math.isfinite(self.h_max)):
            raise ValueError(f"h_max must be positive and finite, got {self.h_max}")
        for name in ("gamma_h", "gamma_l"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")

    def contains(self, h, l):
        """Membership of ``(h, l)`` in the prohibited region."""
        _check_pair(h, l)
        if h >= self.h_max:
            return True
        for e in self.entries:
            if h > (1.0 - self.gamma_h) * e.h and l > e.l - self.gamma_l * e.h:
                return True
        return False

    def acceptable(self, h, l):
        return not self.contains(h, l)

    def margins_hold(self, h, l):
        """Sufficient improvement against every entry, regardless of ``h_max``."""
        _check_pair(h, l)
        return all(h <= (1.0 - self.gamma_h) * e.h or l <= e.l - self.gamma_l * e.h for e in self.entries)

    def add(self, h, l):
        """Add ``(h, l)``; corners contained in the new corner are dropped."""
        _check_pair(h, l)
        if h >= self.h_max:
            return self
        if self.prune:
            thresh = l - self.gamma_l * h
            self.entries = [e for e in self.entries if not (e.h >= h and e.l - self.gamma_l * e.h >= thresh)]
        self.entries.append(FilterEntry(float(h), float(l)))
        return self

    @property
    def min_h(self):
        return min((e.h for e in self.entries), default=self.h_max)

    def snapshot(self):
        return tuple(self.entries)

    def copy(self):
        return Filter(self.h_max, self.gamma_h, self.gamma_l, list(self.entries), self.prune)

    def to_csv(self, path_or_file):
        """Write one ``h,l`` row per entry."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            writer = csv.writer(fh)
            writer.writerow(["h", "l"])
            for e in self.entries:
                writer.writerow([repr(e.h), repr(e.l)])
        finally:
            if own:
                fh.close()

    def __len__(self):
        return len(self.entries)


def filter_init(h_max, gamma_h=1e-5, gamma_l=1e-5):
    return Filter(h_max, gamma_h, gamma_l)


def filter_acceptable(filt, h, l):
    return filt.acceptable(h, l)


def filter_add(filt, h, l):
    return filt.add(h, l)


def in_region(entries, h_max, gamma_h, gamma_l, h, l):
    """Membership against a bare entry sequence, e.g. a history snapshot."""
    if h >= h_max:
        return True
    return any(h > (1.0 - gamma_h) * e.h and l > e.l - gamma_l * e.h for e in entries)
