"""Bit-packed stabilizer tableau (destabilizer + stabilizer rows).

Rows ``0..n-1`` are destabilizers, rows ``n..2n-1`` stabilizers.  Each row is
``i**r X^x Z^z`` with ``x``/``z`` packed 64 qubits per uint64 word, so every
gate is a handful of word-wide operations over all rows at once.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .. import gf2
from .bits import n_words, pack, parity, unpack
from .circuit import Gate
from .pauli import PauliOperator


class TableauError(ValueError):
    """Invalid tableau input or broken tableau invariant."""


def _popcount_rows(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=-1, dtype=np.int64)


class StabilizerTableau:
    def __init__(self, n_qubits: int) -> None:
        if n_qubits < 1:
            raise TableauError(f"need at least one qubit, got {n_qubits}")
        n = int(n_qubits)
        self.n = n
        w = n_words(n)
        self.x = np.zeros((2 * n, w), dtype=np.uint64)
        self.z = np.zeros((2 * n, w), dtype=np.uint64)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        for i in range(n):
            word, mask = self._loc(i)
            self.x[i, word] |= mask
            self.z[n + i, word] |= mask
        self.consumed = np.zeros(n, dtype=bool)

    # -- construction -------------------------------------------------
    @property
    def n_qubits(self) -> int:
        return self.n

    def copy(self) -> StabilizerTableau:
        new = StabilizerTableau.__new__(StabilizerTableau)
        new.n = self.n
        new.x = self.x.copy()
        new.z = self.z.copy()
        new.r = self.r.copy()
        new.consumed = self.consumed.copy()
        return new

    @classmethod
    def _from_rows(cls, xb: np.ndarray, zb: np.ndarray, r: np.ndarray) -> StabilizerTableau:
        """Build from unpacked ``(2n, n)`` bool rows and XZ-form exponents."""
        n = xb.shape[1]
        new = cls.__new__(cls)
        new.n = n
        new.x = pack(xb)
        new.z = pack(zb)
        new.r = (np.asarray(r, dtype=np.int64) % 4).astype(np.uint8)
        new.consumed = np.zeros(n, dtype=bool)
        return new

    @classmethod
    def from_stabilizers(cls, generators: Sequence[PauliOperator | str]) -> StabilizerTableau:
        """Tableau for the state stabilized by ``generators``.

        The generators must be Hermitian, mutually commuting and independent.
        Destabilizers are chosen by solving the symplectic pairing over GF(2).
        """
        ops = [PauliOperator.from_string(g) if isinstance(g, str) else g for g in generators]
        n = len(ops)
        if n == 0 or any(op.n_qubits != n for op in ops):
            raise TableauError("need exactly n generators on n qubits")
        if not all(op.is_hermitian for op in ops):
            raise TableauError("stabilizer generators must have a real sign")
        sx = np.array([op.x_bits for op in ops], dtype=np.uint8)
        sz = np.array([op.z_bits for op in ops], dtype=np.uint8)
        comm = (sx.astype(np.int64) @ sz.T.astype(np.int64) + sz.astype(np.int64) @ sx.T.astype(np.int64)) & 1
        if comm.any():
            raise TableauError("stabilizer generators do not commute")
        if gf2.rank(np.concatenate([sx, sz], axis=1)) < n:
            raise TableauError("stabilizer generators are not independent")
        # destabilizer d must satisfy d_x.s_z + d_z.s_x = delta
        a = np.concatenate([sz, sx], axis=1)
        d = gf2.solve(a, np.eye(n, dtype=np.uint8)).T  # rows: [d_x | d_z]
        dx, dz = d[:, :n].copy(), d[:, n:].copy()
        for i in range(n):
            for j in range(i):
                if (int(dx[i] @ dz[j]) + int(dz[i] @ dx[j])) & 1:
                    dx[i] ^= sx[j]
                    dz[i] ^= sz[j]
        xb = np.concatenate([dx, sx]).astype(bool)
        zb = np.concatenate([dz, sz]).astype(bool)
        r = np.concatenate(
            [np.count_nonzero(dx & dz, axis=1), [op.xz_exponent() for op in ops]]
        )
        return cls._from_rows(xb, zb, r)

    def tensor(self, other: StabilizerTableau) -> StabilizerTableau:
        """Tableau of ``self ⊗ other``; ``other``'s qubits follow ``self``'s."""
        n1, n2 = self.n, other.n
        n = n1 + n2
        xb = np.zeros((2 * n, n), dtype=bool)
        zb = np.zeros((2 * n, n), dtype=bool)
        r = np.zeros(2 * n, dtype=np.uint8)
        for dst, src, cols in (
            ((0, n1), (self, 0), slice(0, n1)),
            ((n, n + n1), (self, n1), slice(0, n1)),
            ((n1, n), (other, 0), slice(n1, n)),
            ((n + n1, 2 * n), (other, n2), slice(n1, n)),
        ):
            tab, first = src
            rows = slice(first, first + tab.n)
            xb[dst[0] : dst[1], cols] = unpack(tab.x[rows], tab.n)
            zb[dst[0] : dst[1], cols] = unpack(tab.z[rows], tab.n)
            r[dst[0] : dst[1]] = tab.r[rows]
        new = StabilizerTableau._from_rows(xb, zb, r)
        new.consumed = np.concatenate([self.consumed, other.consumed])
        return new

    # -- row access -----------------------------------------------------
    @staticmethod
    def _loc(q: int) -> tuple[int, np.uint64]:
        return q >> 6, np.uint64(1 << (q & 63))

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise IndexError(f"qubit {q} out of range for {self.n} qubits")

    def _row(self, i: int) -> PauliOperator:
        return PauliOperator.from_xz_form(unpack(self.x[i], self.n), unpack(self.z[i], self.n), int(self.r[i]))

    def stabilizer(self, i: int) -> PauliOperator:
        return self._row(self.n + i)

    def destabilizer(self, i: int) -> PauliOperator:
        return self._row(i)

    def stabilizers(self) -> list[PauliOperator]:
        return [self.stabilizer(i) for i in range(self.n)]

    def destabilizers(self) -> list[PauliOperator]:
        return [self.destabilizer(i) for i in range(self.n)]

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.stabilizers())

    def __repr__(self) -> str:
        return f"StabilizerTableau(n={self.n}, stabilizers={[str(s) for s in self.stabilizers()]})"

    # -- Clifford gates -------------------------------------------------
    def _cols(self, q: int) -> tuple[int, np.uint64, np.ndarray, np.ndarray]:
        self._check_qubit(q)
        w, m = self._loc(q)
        return w, m, (self.x[:, w] & m) != 0, (self.z[:, w] & m) != 0

    def h(self, q: int) -> StabilizerTableau:
        w, m, xq, zq = self._cols(q)
        self.r = (self.r + 2 * (xq & zq)).astype(np.uint8) % 4
        flip = xq ^ zq
        self.x[flip, w] ^= m
        self.z[flip, w] ^= m
        return self

    def s(self, q: int) -> StabilizerTableau:
        w, m, xq, _ = self._cols(q)
        self.r = (self.r + xq).astype(np.uint8) % 4
        self.z[xq, w] ^= m
        return self

    def s_dag(self, q: int) -> StabilizerTableau:
        return self.s(q).s(q).s(q)

    def cnot(self, control: int, target: int) -> StabilizerTableau:
        if control == target:
            raise TableauError("CNOT needs distinct qubits")
        wc, mc, xc, _ = self._cols(control)
        wt, mt, _, zt = self._cols(target)
        self.x[xc, wt] ^= mt
        self.z[zt, wc] ^= mc
        return self

    def cz(self, a: int, b: int) -> StabilizerTableau:
        if a == b:
            raise TableauError("CZ needs distinct qubits")
        wa, ma, xa, _ = self._cols(a)
        wb, mb, xb, _ = self._cols(b)
        self.r = (self.r + 2 * (xa & xb)).astype(np.uint8) % 4
        self.z[xb, wa] ^= ma
        self.z[xa, wb] ^= mb
        return self

    def pauli(self, q: int, kind: str) -> StabilizerTableau:
        """Conjugate by a single-qubit Pauli ``kind`` in {"I", "X", "Y", "Z"}."""
        _, _, xq, zq = self._cols(q)
        flip = {"I": np.zeros_like(xq), "X": zq, "Z": xq, "Y": xq ^ zq}[kind.upper()]
        self.r = (self.r + 2 * flip).astype(np.uint8) % 4
        return self

    def apply_pauli(self, op: PauliOperator) -> StabilizerTableau:
        """Conjugate by a multi-qubit Pauli (sign of ``op`` is irrelevant)."""
        self._check_size(op)
        flip = self._anticommuting(pack(op.x_bits), pack(op.z_bits))
        self.r = (self.r + 2 * flip).astype(np.uint8) % 4
        return self

    def apply(self, g: Gate) -> StabilizerTableau:
        g.check(self.n)
        name, qs = g.name, g.qubits
        if name == "H":
            return self.h(qs[0])
        if name == "S":
            return self.s(qs[0])
        if name == "CNOT":
            return self.cnot(*qs)
        if name == "CZ":
            return self.cz(*qs)
        return self.pauli(qs[0], name)

    # -- measurement ----------------------------------------------------
    def _check_size(self, op: PauliOperator) -> None:
        if op.n_qubits != self.n:
            raise TableauError(f"operator on {op.n_qubits} qubits, tableau has {self.n}")

    def _anticommuting(self, ox: np.ndarray, oz: np.ndarray) -> np.ndarray:
        return parity((self.x & oz) ^ (self.z & ox)).astype(bool)

    def _multiply_rows_into(self, rows: np.ndarray, pivot: int) -> None:
        """row <- row * pivot for every index in ``rows``."""
        if rows.size == 0:
            return
        extra = 2 * _popcount_rows(self.z[rows] & self.x[pivot])
        self.r[rows] = ((self.r[rows].astype(np.int64) + int(self.r[pivot]) + extra) % 4).astype(np.uint8)
        self.x[rows] ^= self.x[pivot]
        self.z[rows] ^= self.z[pivot]

    def _product_exponent(self, rows: np.ndarray) -> int:
        """XZ exponent of the ordered product of the given rows."""
        if rows.size == 0:
            return 0
        zs = self.z[rows]
        prefix = np.bitwise_xor.accumulate(zs, axis=0)
        cross = _popcount_rows(prefix[:-1] & self.x[rows[1:]]).sum() if rows.size > 1 else 0
        return int((self.r[rows].astype(np.int64).sum() + 2 * cross) % 4)

    def _prepare_observable(self, observable: PauliOperator) -> tuple[np.ndarray, np.ndarray, int]:
        self._check_size(observable)
        if not observable.is_hermitian:
            raise TableauError(f"observable {observable} has an imaginary sign")
        return pack(observable.x_bits), pack(observable.z_bits), observable.xz_exponent()

    def expectation(self, observable: PauliOperator) -> int:
        """+1 / -1 when the outcome is deterministic, 0 when it is random."""
        ox, oz, r_obs = self._prepare_observable(observable)
        anti = self._anticommuting(ox, oz)
        if anti[self.n :].any():
            return 0
        rows = np.flatnonzero(anti[: self.n]) + self.n
        return 1 if self._product_exponent(rows) == r_obs else -1

    def measure(
        self,
        observable: PauliOperator,
        rng: np.random.Generator | None = None,
        forced: int | None = None,
    ) -> tuple[int, bool]:
        """Projectively measure a Hermitian Pauli observable in place.

        Returns ``(bit, random)`` where ``bit`` is 0 for eigenvalue +1 and 1
        for -1.  ``forced`` postselects a random outcome; forcing an outcome
        that has probability zero raises :class:`TableauError`.
        """
        ox, oz, r_obs = self._prepare_observable(observable)
        anti = self._anticommuting(ox, oz)
        stab_hits = np.flatnonzero(anti[self.n :])
        if stab_hits.size == 0:
            rows = np.flatnonzero(anti[: self.n]) + self.n
            bit = 0 if self._product_exponent(rows) == r_obs else 1
            if forced is not None and forced != bit:
                raise TableauError(f"outcome {forced} has probability zero (deterministic {bit})")
            return bit, False
        p = self.n + int(stab_hits[0])
        others = np.flatnonzero(anti)
        others = others[others != p]
        self._multiply_rows_into(others, p)
        d = p - self.n
        self.x[d] = self.x[p]
        self.z[d] = self.z[p]
        self.r[d] = self.r[p]
        if forced is not None:
            bit = int(forced)
        else:
            if rng is None:
                raise TableauError("random outcome needs an rng (or a forced outcome)")
            bit = int(rng.integers(2))
        self.x[p] = ox
        self.z[p] = oz
        self.r[p] = (r_obs + 2 * bit) % 4
        return bit, True

    # -- invariants & canonical forms -----------------------------------
    def check_invariants(self) -> None:
        """Raise :class:`TableauError` unless the tableau is a valid AG tableau."""
        n = self.n
        xb = unpack(self.x, n).astype(np.int64)
        zb = unpack(self.z, n).astype(np.int64)
        gram = (xb @ zb.T + zb @ xb.T) & 1
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        expected[:n, n:] = np.eye(n, dtype=np.int64)
        expected[n:, :n] = np.eye(n, dtype=np.int64)
        if not np.array_equal(gram, expected):
            bad = np.argwhere(gram != expected)[0]
            raise TableauError(f"commutation pairing violated at rows {tuple(int(b) for b in bad)}")
        n_y = np.count_nonzero(xb[n:] & zb[n:], axis=1)
        if np.any((self.r[n:].astype(np.int64) - n_y) % 2):
            raise TableauError("stabilizer generator with imaginary sign")

    def is_valid(self) -> bool:
        try:
            self.check_invariants()
        except TableauError:
            return False
        return True

    def canonical_stabilizers(self) -> list[str]:
        """Stabilizer group in reduced row-echelon form (signs included).

        Two tableaux describe the same state iff these lists are equal.
        """
        n = self.n
        xb = unpack(self.x[n:], n).copy()
        zb = unpack(self.z[n:], n).copy()
        r = self.r[n:].astype(np.int64).copy()
        xb, zb, r = _echelon(xb, zb, r)
        return [str(PauliOperator.from_xz_form(xb[i], zb[i], r[i])) for i in range(n)]

    def same_state(self, other: StabilizerTableau) -> bool:
        return self.n == other.n and self.canonical_stabilizers() == other.canonical_stabilizers()

    def remove_qubits(self, qubits: Iterable[int]) -> StabilizerTableau:
        """Trace out qubits that are each in a single-qubit stabilizer state.

        Every qubit in ``qubits`` must be unentangled (some ±X, ±Y or ±Z on it
        belongs to the stabilizer group).  Returns a new tableau on the
        remaining qubits, in their original order.
        """
        qubits = sorted(set(int(q) for q in qubits))
        n = self.n
        xb = unpack(self.x[n:], n).copy()
        zb = unpack(self.z[n:], n).copy()
        r = self.r[n:].astype(np.int64).copy()
        for q in qubits:
            self._check_qubit(q)
            for kind in "ZXY":
                local = PauliOperator.single(n, q, kind)
                value = self.expectation(local)
                if value:
                    break
            else:
                raise TableauError(f"qubit {q} is entangled with the rest; cannot remove it")
            lx, lz = local.x_bits, local.z_bits
            r_local = local.xz_exponent() + (0 if value == 1 else 2)
            hit = (xb[:, q] | zb[:, q]).nonzero()[0]
            # rows commute with the local Pauli, so on qubit q they equal it
            r[hit] = (r[hit] + r_local + 2 * (zb[hit, q] & lx[q])) % 4
            xb[hit] ^= lx
            zb[hit] ^= lz
        keep = [q for q in range(n) if q not in set(qubits)]
        xb, zb, r = _echelon(xb, zb, r)
        nonzero = (xb | zb).any(axis=1)
        if np.any(r[~nonzero] % 4):
            raise TableauError("inconsistent stabilizer group during qubit removal")
        xb, zb, r = xb[nonzero][:, keep], zb[nonzero][:, keep], r[nonzero]
        gens = [PauliOperator.from_xz_form(xb[i], zb[i], r[i]) for i in range(len(r))]
        new = StabilizerTableau.from_stabilizers(gens)
        new.consumed = self.consumed[keep].copy()
        return new


def _echelon(xb: np.ndarray, zb: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Phase-tracking RREF of Pauli rows over the column order x_0..x_{n-1}, z_0..z_{n-1}."""
    xb, zb, r = xb.copy(), zb.copy(), np.asarray(r, dtype=np.int64).copy()
    m, n = xb.shape
    row = 0
    for col in range(2 * n):
        if row == m:
            break
        column = xb[:, col] if col < n else zb[:, col - n]
        hits = np.flatnonzero(column[row:]) + row
        if hits.size == 0:
            continue
        p = hits[0]
        if p != row:
            for arr in (xb, zb, r):
                arr[[row, p]] = arr[[p, row]]
        column = xb[:, col] if col < n else zb[:, col - n]
        others = np.flatnonzero(column)
        others = others[others != row]
        if others.size:
            r[others] = (r[others] + r[row] + 2 * np.count_nonzero(zb[others] & xb[row], axis=1)) % 4
            xb[others] ^= xb[row]
            zb[others] ^= zb[row]
        row += 1
    return xb, zb, r

