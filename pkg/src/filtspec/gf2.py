"""Bit-packed row reduction over GF(2).

Each row is packed into a Python ``int`` with column 0 in the most
significant position, so the leading column of a row is its highest set bit
and row operations are single XORs.
"""

from __future__ import annotations

import numpy as np

MAX_PACKED_COLS = 62


def pack(m: np.ndarray) -> list[int]:
    n = m.shape[1]
    if n == 0:
        return [0] * m.shape[0]
    weights = np.left_shift(np.int64(1), np.arange(n - 1, -1, -1, dtype=np.int64))
    return [int(x) for x in (np.asarray(m, dtype=np.int64) & 1) @ weights]


def unpack(rows: list[int], n: int) -> np.ndarray:
    if not rows or n == 0:
        return np.zeros((len(rows), n), dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return (np.array(rows, dtype=np.int64)[:, None] >> shifts) & 1


def rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Same contract as the generic reducer: reduced matrix (input shape) and pivot columns."""
    nrows, n = m.shape
    if n > MAX_PACKED_COLS:
        raise ValueError(f"at most {MAX_PACKED_COLS} columns can be packed")
    by_lead: dict[int, int] = {}
    for row in pack(m):
        for lead, piv in by_lead.items():
            if row >> lead & 1:
                row ^= piv
        if row:
            lead = row.bit_length() - 1
            # clear the new pivot bit out of the existing rows
            for k, piv in by_lead.items():
                if piv >> lead & 1:
                    by_lead[k] = piv ^ row
            by_lead[lead] = row
    leads = sorted(by_lead, reverse=True)
    reduced = unpack([by_lead[k] for k in leads] + [0] * (nrows - len(leads)), n)
    return reduced, [n - 1 - k for k in leads]
