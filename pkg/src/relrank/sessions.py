"""Search-session containers shared by the metrics, ranking, and sim layers.

A session is a query with an ordered candidate list: per-candidate stable ids,
base ranking scores, calibrated support-need probabilities, and at most one
booked candidate. ``SessionSet`` is the columnar form (every session holds the
same number of candidates) used for vectorized sweeps and for the session log
on disk.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError


@dataclass
class SearchSession:
    """One query's candidate slate. ``booked_index`` indexes into the
    candidate arrays (not positions of any particular ordering); None means
    the session ended without a booking."""

    candidate_ids: np.ndarray
    base_scores: np.ndarray
    cs_probs: np.ndarray
    booked_index: int | None = None
    session_id: int = 0

    def __post_init__(self):
        self.candidate_ids = np.asarray(self.candidate_ids, dtype=np.int64)
        self.base_scores = np.asarray(self.base_scores, dtype=np.float64)
        self.cs_probs = np.asarray(self.cs_probs, dtype=np.float64)
        n = self.candidate_ids.size
        if n == 0:
            raise DataError("session has no candidates")
        if self.base_scores.shape != (n,) or self.cs_probs.shape != (n,):
            raise ConfigError("candidate arrays must share one length")
        if np.any((self.cs_probs < 0) | (self.cs_probs > 1)):
            raise DataError("cs_probs must lie in [0, 1]")
        if self.booked_index is not None and not 0 <= self.booked_index < n:
            raise ConfigError(f"booked_index {self.booked_index} out of range for {n} candidates")

    @property
    def n_candidates(self) -> int:
        return self.candidate_ids.size

    @property
    def has_booking(self) -> bool:
        return self.booked_index is not None


@dataclass
class SessionSet:
    """Columnar stack of sessions with a uniform candidate count.

    ``booked_pos`` holds the booked candidate's column index per session,
    -1 when no booking happened. ``cs_realized`` and ``host_cancelled`` are
    the simulator's ground-truth outcomes for the booked stay (always False
    for unbooked sessions).
    """

    candidate_ids: np.ndarray  # (n, k) int64
    base_scores: np.ndarray  # (n, k) float64
    cs_probs: np.ndarray  # (n, k) float64
    booked_pos: np.ndarray  # (n,) int64, -1 = no booking
    cs_realized: np.ndarray = field(default=None)  # (n,) bool
    host_cancelled: np.ndarray = field(default=None)  # (n,) bool

    def __post_init__(self):
        self.candidate_ids = np.asarray(self.candidate_ids, dtype=np.int64)
        self.base_scores = np.asarray(self.base_scores, dtype=np.float64)
        self.cs_probs = np.asarray(self.cs_probs, dtype=np.float64)
        self.booked_pos = np.asarray(self.booked_pos, dtype=np.int64)
        n, k = self.candidate_ids.shape
        if self.base_scores.shape != (n, k) or self.cs_probs.shape != (n, k):
            raise ConfigError("SessionSet arrays must share one (n, k) shape")
        if self.booked_pos.shape != (n,):
            raise ConfigError("booked_pos must have one entry per session")
        if self.cs_realized is None:
            self.cs_realized = np.zeros(n, dtype=bool)
        if self.host_cancelled is None:
            self.host_cancelled = np.zeros(n, dtype=bool)
        self.cs_realized = np.asarray(self.cs_realized, dtype=bool)
        self.host_cancelled = np.asarray(self.host_cancelled, dtype=bool)

    @property
    def n_sessions(self) -> int:
        return self.candidate_ids.shape[0]

    @property
    def n_candidates(self) -> int:
        return self.candidate_ids.shape[1]

    def session(self, i: int) -> SearchSession:
        booked = int(self.booked_pos[i])
        return SearchSession(
            candidate_ids=self.candidate_ids[i],
            base_scores=self.base_scores[i],
            cs_probs=self.cs_probs[i],
            booked_index=booked if booked >= 0 else None,
            session_id=i,
        )

    def sessions(self):
        for i in range(self.n_sessions):
            yield self.session(i)


SESSION_LOG_COLUMNS = ("session_id", "position", "candidate_id", "base_score", "p_cs", "booked")


def write_session_log(path: str, sessions: SessionSet) -> None:
    """One row per impression, positions in logged (ranked) order."""
    import os

    tmp = f"{path}.partial"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SESSION_LOG_COLUMNS)
        for i in range(sessions.n_sessions):
            booked = sessions.booked_pos[i]
            for pos in range(sessions.n_candidates):
                writer.writerow(
                    [
                        i,
                        pos,
                        int(sessions.candidate_ids[i, pos]),
                        repr(float(sessions.base_scores[i, pos])),
                        repr(float(sessions.cs_probs[i, pos])),
                        int(pos == booked),
                    ]
                )
    os.replace(tmp, path)


def read_session_log(path: str) -> SessionSet:
    rows: dict[int, list[tuple[int, int, float, float, int]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SESSION_LOG_COLUMNS:
            raise ConfigError(f"unexpected session log columns in {path}: {reader.fieldnames}")
        for rec in reader:
            rows.setdefault(int(rec["session_id"]), []).append(
                (
                    int(rec["position"]),
                    int(rec["candidate_id"]),
                    float(rec["base_score"]),
                    float(rec["p_cs"]),
                    int(rec["booked"]),
                )
            )
    if not rows:
        raise DataError(f"empty session log {path}")
    n = len(rows)
    k = len(next(iter(rows.values())))
    ids = np.zeros((n, k), dtype=np.int64)
    base = np.zeros((n, k))
    probs = np.zeros((n, k))
    booked = np.full(n, -1, dtype=np.int64)
    for i, sid in enumerate(sorted(rows)):
        recs = sorted(rows[sid])
        if len(recs) != k:
            raise ConfigError("session log has ragged candidate counts")
        for pos, cid, b, p, flag in recs:
            ids[i, pos] = cid
            base[i, pos] = b
            probs[i, pos] = p
            if flag:
                booked[i] = pos
    return SessionSet(candidate_ids=ids, base_scores=base, cs_probs=probs, booked_pos=booked)
