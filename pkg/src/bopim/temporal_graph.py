"""Timestamped contact parsing and snapshot aggregation.

A :class:`TemporalGraph` is an ordered tuple of undirected snapshot edge
sets over the dense node range ``0..n-1``. Raw contact files are parsed into
a :class:`ContactList` and cut into ``T`` equal-width time windows by
:func:`aggregate`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, InvalidT, MalformedLine

DEFAULT_COLUMNS = "u v t"


@dataclass
class ParseReport:
    lines_read: int = 0
    contacts: int = 0
    comments: int = 0
    blank: int = 0
    self_loops: int = 0


@dataclass(frozen=True)
class ContactList:
    """Raw undirected contacts ``(u, v, t)``; self-loops already removed."""

    u: np.ndarray
    v: np.ndarray
    t: np.ndarray
    n_hint: int | None = None
    report: ParseReport = field(default_factory=ParseReport, compare=False)

    def __len__(self) -> int:
        return len(self.u)

    @property
    def node_ids(self) -> np.ndarray:
        return np.unique(np.concatenate([self.u, self.v]))

    def relabeled(self) -> tuple["ContactList", np.ndarray]:
        """Map node ids onto ``0..n-1`` preserving order.

        Returns the relabeled contacts and ``labels`` where ``labels[new]``
        is the original id.
        """
        labels = self.node_ids
        u = np.searchsorted(labels, self.u)
        v = np.searchsorted(labels, self.v)
        out = ContactList(u, v, self.t.copy(), n_hint=None, report=self.report)
        return out, labels


def parse_contacts(
    text: str | Iterable[str],
    columns: str = DEFAULT_COLUMNS,
    n_hint: int | None = None,
) -> ContactList:
    """Parse whitespace-delimited contact lines.

    ``columns`` names the column order using the tokens ``u``, ``v`` and
    ``t``; any other token (e.g. ``_``) marks a column to skip. Lines starting
    with ``#`` are comments. Self-loops are dropped and counted in the
    returned ``report``.
    """
    order = columns.replace(",", " ").split()
    try:
        iu, iv, it = order.index("u"), order.index("v"), order.index("t")
    except ValueError:
        raise ValueError(f"columns must name u, v and t: {columns!r}") from None
    width = max(iu, iv, it) + 1

    lines = text.splitlines() if isinstance(text, str) else text
    report = ParseReport()
    us: list[int] = []
    vs: list[int] = []
    ts: list[float] = []
    all_int_time = True
    for lineno, raw in enumerate(lines, start=1):
        report.lines_read += 1
        line = raw.strip()
        if not line:
            report.blank += 1
            continue
        if line.startswith("#"):
            report.comments += 1
            continue
        parts = line.split()
        if len(parts) < width:
            raise MalformedLine(lineno, raw.rstrip("\n"), "too few fields")
        try:
            u = int(parts[iu])
            v = int(parts[iv])
        except ValueError:
            raise MalformedLine(lineno, raw.rstrip("\n")) from None
        tok = parts[it]
        try:
            t: float = int(tok)
        except ValueError:
            try:
                t = float(tok)
            except ValueError:
                raise MalformedLine(lineno, raw.rstrip("\n")) from None
            all_int_time = False
        if u < 0 or v < 0:
            raise MalformedLine(lineno, raw.rstrip("\n"), "negative node id")
        if u == v:
            report.self_loops += 1
            continue
        us.append(u)
        vs.append(v)
        ts.append(t)

    if not us:
        raise EmptyInput("no valid contact lines")
    report.contacts = len(us)
    t_arr = np.asarray(ts, dtype=np.int64 if all_int_time else np.float64)
    return ContactList(
        np.asarray(us, dtype=np.int64),
        np.asarray(vs, dtype=np.int64),
        t_arr,
        n_hint=n_hint,
        report=report,
    )


def _canonical_edges(pairs: np.ndarray) -> np.ndarray:
    if len(pairs) == 0:
        return np.empty((0, 2), dtype=np.int64)
    pairs = np.sort(pairs.astype(np.int64), axis=1)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.unique(pairs, axis=0)
    return pairs.reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class TemporalGraph:
    """Ordered snapshots of undirected edges on nodes ``0..n-1``.

    Each snapshot is an ``(E_t, 2)`` integer array of unique pairs with
    ``u < v``, sorted lexicographically. Instances are immutable.
    """

    n: int
    snapshots: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.snapshots) < 1:
            raise InvalidT("need at least one snapshot")
        for s in self.snapshots:
            s.setflags(write=False)
            if len(s) and (s.min() < 0 or s.max() >= self.n):
                raise ValueError("edge endpoint outside 0..n-1")

    @classmethod
    def from_snapshots(cls, n: int, snapshots: Sequence[Iterable[tuple[int, int]]]) -> "TemporalGraph":
        """Build from per-snapshot pair lists; pairs are symmetrized and deduplicated."""
        snaps = []
        for edges in snapshots:
            arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
            snaps.append(_canonical_edges(arr))
        return cls(n, tuple(snaps))

    @property
    def T(self) -> int:
        return len(self.snapshots)

    def union_edges(self) -> np.ndarray:
        return _canonical_edges(np.concatenate(self.snapshots, axis=0))

    @property
    def m(self) -> int:
        return len(self.union_edges())

    @property
    def total_contacts(self) -> int:
        return sum(len(s) for s in self.snapshots)

    def __eq__(self, other):
        if not isinstance(other, TemporalGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.T == other.T
            and all(np.array_equal(a, b) for a, b in zip(self.snapshots, other.snapshots))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"TemporalGraph(n={self.n}, T={self.T}, m={self.m})"


def window_index(t: np.ndarray, T: int) -> np.ndarray:
    """Assign timestamps to ``T`` equal-width windows over ``[t.min(), t.max()]``.

    Windows are half-open except the last, which is closed at ``t.max()``.
    """
    t_min, t_max = t.min(), t.max()
    if t_max == t_min:
        return np.zeros(len(t), dtype=np.int64)
    if np.issubdtype(t.dtype, np.integer):
        # exact integer arithmetic, no float boundary drift
        idx = ((t - t_min) * T) // (t_max - t_min)
    else:
        idx = np.floor((t - t_min) * T / (t_max - t_min)).astype(np.int64)
    return np.minimum(idx, T - 1).astype(np.int64)


def aggregate(contacts: ContactList, T: int) -> TemporalGraph:
    """Bin contacts into ``T`` equal-duration snapshots with set semantics."""
    if not isinstance(T, (int, np.integer)) or T < 1:
        raise InvalidT(f"T must be a positive integer, got {T!r}")
    if len(contacts) == 0:
        raise EmptyInput("no contacts to aggregate")
    if T > 1 and contacts.t.min() == contacts.t.max():
        warnings.warn(
            "all contacts share one timestamp; placing them in snapshot 0",
            RuntimeWarning,
            stacklevel=2,
        )
    idx = window_index(contacts.t, int(T))
    pairs = np.stack([contacts.u, contacts.v], axis=1)
    n = int(max(contacts.u.max(), contacts.v.max())) + 1
    if contacts.n_hint is not None:
        if contacts.n_hint < n:
            raise ValueError(f"n_hint={contacts.n_hint} smaller than max node id + 1 ({n})")
        n = contacts.n_hint
    snaps = tuple(_canonical_edges(pairs[idx == w]) for w in range(int(T)))
    return TemporalGraph(n, snaps)


def aggregate_degrees(G: TemporalGraph) -> np.ndarray:
    """Distinct-neighbour degree of every node on the union graph."""
    edges = G.union_edges()
    return np.bincount(edges.ravel(), minlength=G.n).astype(np.int64)


def load_graph(
    path: str | Path,
    T: int,
    columns: str = DEFAULT_COLUMNS,
    n_hint: int | None = None,
) -> tuple[TemporalGraph, np.ndarray]:
    """Read a contact file, relabel ids densely and aggregate.

    Returns the graph and the ``labels`` array mapping dense ids back to the
    ids used in the file.
    """
    with open(path, encoding="utf-8") as fh:
        contacts = parse_contacts(fh, columns=columns)
    labels = contacts.node_ids
    dense = labels[0] == 0 and labels[-1] == len(labels) - 1
    if dense:
        contacts = ContactList(contacts.u, contacts.v, contacts.t, n_hint=n_hint, report=contacts.report)
        n = n_hint or int(labels[-1]) + 1
        labels = np.arange(n)
    else:
        contacts, labels = contacts.relabeled()
    return aggregate(contacts, T), labels


def synthetic_proximity_contacts(
    n: int,
    duration: int,
    rng: np.random.Generator,
    mean_contacts_per_step: float = 4.0,
    activity_sigma: float = 1.0,
    n_groups: int = 4,
    group_affinity: float = 4.0,
) -> ContactList:
    """Draw a face-to-face style contact stream.

    Nodes carry log-normal activity levels and belong to groups; each time
    step draws a Poisson number of contacts between pairs chosen with
    probability proportional to ``activity_i * activity_j``, boosted by
    ``group_affinity`` within a group. The result has heterogeneous
    aggregate degrees, like the Reality or Hospital data.
    """
    activity = rng.lognormal(0.0, activity_sigma, size=n)
    group = rng.integers(0, n_groups, size=n)
    iu, ju = np.triu_indices(n, k=1)
    w = activity[iu] * activity[ju] * np.where(group[iu] == group[ju], group_affinity, 1.0)
    p = w / w.sum()
    counts = rng.poisson(mean_contacts_per_step, size=duration)
    total = int(counts.sum())
    picks = rng.choice(len(p), size=total, p=p)
    t = np.repeat(np.arange(duration, dtype=np.int64), counts)
    return ContactList(iu[picks].astype(np.int64), ju[picks].astype(np.int64), t, n_hint=n)


def synthetic_proximity_graph(n: int = 64, T: int = 10, seed: int = 0, **kwargs) -> TemporalGraph:
    """Convenience wrapper: :func:`synthetic_proximity_contacts` aggregated to ``T`` snapshots."""
    rng = np.random.default_rng(seed)
    duration = kwargs.pop("duration", 50 * T)
    return aggregate(synthetic_proximity_contacts(n, duration, rng, **kwargs), T)
