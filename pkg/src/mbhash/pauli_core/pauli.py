"""Pauli operators and sign-free Pauli frames.

A :class:`PauliOperator` is ``sign * P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}`` with each
``P_j`` in ``{I, X, Y, Z}`` and ``sign`` in ``{+1, +i, -1, -i}``.  Qubit 0 is
the leftmost character of the string form.

Internally products are computed in the "XZ form" ``i**r * X^x Z^z`` (per
qubit ``X`` before ``Z``), where ``Y = i X Z``.  In that form a product only
needs ``r1 + r2 + 2 * |z1 & x2|``, which is what the packed tableau uses too.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_SIGNS = {0: 1, 1: 1j, 2: -1, 3: -1j}
_SIGN_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_CHARS = np.array(["I", "X", "Z", "Y"])


def _sign_exponent(sign: complex) -> int:
    for k, value in _SIGNS.items():
        if value == sign:
            return k
    raise ValueError(f"sign must be one of +1, -1, +1j, -1j; got {sign!r}")


@dataclass
class PauliOperator:
    """n-qubit Pauli operator with X/Z bit vectors and a sign.

    ``phase`` is the exponent ``k`` of the sign ``i**k``.
    """

    x_bits: np.ndarray
    z_bits: np.ndarray
    phase: int = 0

    def __post_init__(self) -> None:
        self.x_bits = np.asarray(self.x_bits, dtype=bool).copy()
        self.z_bits = np.asarray(self.z_bits, dtype=bool).copy()
        if self.x_bits.ndim != 1 or self.x_bits.shape != self.z_bits.shape:
            raise ValueError("x_bits and z_bits must be 1-D and of equal length")
        self.phase = int(self.phase) % 4

    @property
    def n_qubits(self) -> int:
        return int(self.x_bits.size)

    @property
    def sign(self) -> complex:
        return _SIGNS[self.phase]

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(np.zeros(n, bool), np.zeros(n, bool))

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        """Parse strings such as ``"XZ"``, ``"-iYI"``, ``"+_X_"`` (``_`` = ``I``)."""
        text = text.strip()
        phase = 0
        for prefix, k in (("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)):
            if text.startswith(prefix) and (len(text) == len(prefix) or text[len(prefix)] in "IXYZ_"):
                phase = k
                text = text[len(prefix):]
                break
        x = np.array([c in "XY" for c in text], dtype=bool)
        z = np.array([c in "ZY" for c in text], dtype=bool)
        if any(c not in "IXYZ_" for c in text):
            raise ValueError(f"invalid Pauli string {text!r}")
        return cls(x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str, phase: int = 0) -> PauliOperator:
        """``kind`` in X/Y/Z acting on ``qubit`` of an ``n``-qubit register."""
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for {n} qubits")
        op = cls.identity(n)
        op.x_bits[qubit] = kind in "XY"
        op.z_bits[qubit] = kind in "ZY"
        op.phase = phase % 4
        return op

    @classmethod
    def from_xz_form(cls, x: np.ndarray, z: np.ndarray, r: int) -> PauliOperator:
        x = np.asarray(x, dtype=bool)
        z = np.asarray(z, dtype=bool)
        n_y = int(np.count_nonzero(x & z))
        return cls(x, z, (int(r) - n_y) % 4)

    def xz_exponent(self) -> int:
        """Exponent ``r`` such that this operator equals ``i**r X^x Z^z``."""
        return (self.phase + int(np.count_nonzero(self.x_bits & self.z_bits))) % 4

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        r = self.xz_exponent() + other.xz_exponent()
        r += 2 * int(np.count_nonzero(self.z_bits & other.x_bits))
        return PauliOperator.from_xz_form(self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits, r)

    def commutes(self, other: PauliOperator) -> bool:
        s = np.count_nonzero(self.x_bits & other.z_bits) + np.count_nonzero(self.z_bits & other.x_bits)
        return s % 2 == 0

    def weight(self) -> int:
        return int(np.count_nonzero(self.x_bits | self.z_bits))

    def copy(self) -> PauliOperator:
        return PauliOperator(self.x_bits, self.z_bits, self.phase)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (
            self.phase == other.phase
            and np.array_equal(self.x_bits, other.x_bits)
            and np.array_equal(self.z_bits, other.z_bits)
        )

    def __str__(self) -> str:
        codes = self.x_bits.astype(int) + 2 * self.z_bits.astype(int)
        return _SIGN_TEXT[self.phase] + "".join(_CHARS[codes])

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    def to_matrix(self) -> np.ndarray:
        """Dense matrix in the little-endian basis (qubit j = bit j of the index)."""
        from .dense import pauli_matrix

        return pauli_matrix(self)


@dataclass
class PauliFrame:
    """Sign-free Pauli correction record (byproduct operator).

    Composition is XOR of the X and Z bit vectors.
    """

    x_bits: np.ndarray
    z_bits: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.x_bits = np.asarray(self.x_bits, dtype=bool).copy()
        if self.z_bits is None:
            self.z_bits = np.zeros_like(self.x_bits)
        self.z_bits = np.asarray(self.z_bits, dtype=bool).copy()
        if self.x_bits.shape != self.z_bits.shape:
            raise ValueError("x_bits and z_bits must have equal length")

    @classmethod
    def identity(cls, n: int) -> PauliFrame:
        return cls(np.zeros(n, bool), np.zeros(n, bool))

    @property
    def n_qubits(self) -> int:
        return int(self.x_bits.size)

    def compose(self, other: PauliFrame) -> PauliFrame:
        return PauliFrame(self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits)

    __xor__ = compose

    def as_operator(self) -> PauliOperator:
        return PauliOperator.from_xz_form(self.x_bits, self.z_bits, int(np.count_nonzero(self.x_bits & self.z_bits)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliFrame):
            return NotImplemented
        return np.array_equal(self.x_bits, other.x_bits) and np.array_equal(self.z_bits, other.z_bits)

    def __str__(self) -> str:
        return str(self.as_operator())[1:]
