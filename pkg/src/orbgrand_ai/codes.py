"""Binary linear block codes: random linear codes, CRC codes, encoding and
codebook membership.

Bits are ``uint8`` arrays holding 0/1. Parity checks run on packed words:
``H`` rows are packed with :func:`numpy.packbits` and a membership test is an
AND plus popcount parity per row, i.e. ``O(n (n - k) / 8)`` byte operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .validation import check_bits

# x^12 + x^11 + x^3 + x^2 + x + 1 (CRC-12, as used in telecom framing)
DEFAULT_CRC12 = 0x180F


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination on Python-int row bitsets."""
    rows = [int("".join(map(str, r)), 2) if len(r) else 0 for r in np.asarray(matrix, dtype=np.uint8)]
    rank = 0
    while rows:
        pivot = max(rows)
        if pivot == 0:
            break
        rows.remove(pivot)
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
        rank += 1
    return rank


def gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over GF(2)."""
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) % 2).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class LinearCode:
    """A binary ``[n, k]`` code given by a generator/parity-check pair.

    ``k == n`` is accepted and gives the full space (empty ``parity_check``),
    which is useful as a degenerate decoder test case.
    """

    n: int
    k: int
    generator: np.ndarray
    parity_check: np.ndarray
    kind: str = "custom"
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        n, k = int(self.n), int(self.k)
        if not 0 < k <= n:
            raise ValueError(f"need 0 < k <= n, got n={n}, k={k}")
        G = np.ascontiguousarray(self.generator, dtype=np.uint8)
        H = np.ascontiguousarray(self.parity_check, dtype=np.uint8).reshape(n - k, n)
        if G.shape != (k, n):
            raise ValueError(f"generator must be {k}x{n}, got {G.shape}")
        if np.any(G > 1) or np.any(H > 1):
            raise ValueError("generator and parity_check must be binary")
        if np.any(gf2_matmul(G, H.T)):
            raise ValueError("G H^T != 0 over GF(2)")
        if not self._systematic(G, H) and (gf2_rank(G) != k or gf2_rank(H) != n - k):
            raise ValueError("generator/parity_check not of full row rank")
        G.setflags(write=False)
        H.setflags(write=False)
        packed = np.packbits(H, axis=1)
        packed.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "generator", G)
        object.__setattr__(self, "parity_check", H)
        object.__setattr__(self, "_h_packed", packed)

    @staticmethod
    def _systematic(G, H):
        k, n = G.shape
        return np.array_equal(G[:, :k], np.eye(k, dtype=np.uint8)) and np.array_equal(
            H[:, k:], np.eye(n - k, dtype=np.uint8)
        )

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    def column_syndromes(self) -> np.ndarray:
        """Columns of ``H`` packed little-endian into ``uint64`` words, shape
        ``(n, ceil((n - k) / 64))``. The syndrome of a word is the XOR of the
        columns at its 1 positions."""
        r = self.redundancy
        nw = (r + 63) // 64
        out = np.zeros((self.n, nw), dtype=np.uint64)
        for row in range(r):
            word, bit = divmod(row, 64)
            out[:, word] |= self.parity_check[row].astype(np.uint64) << np.uint64(bit)
        return out

    def to_config(self) -> dict[str, Any]:
        cfg = {"kind": self.kind, "n": self.n, "k": self.k}
        cfg.update(self.descriptor)
        return cfg

    @classmethod
    def from_config(cls, cfg: dict[str, Any]) -> "LinearCode":
        return code_from_config(cfg)

    def __repr__(self):
        extra = "".join(f", {k}={v!r}" for k, v in self.descriptor.items())
        return f"LinearCode(kind={self.kind!r}, n={self.n}, k={self.k}{extra})"


def full_space(n: int) -> LinearCode:
    """The trivial ``[n, n]`` code; every word is a codeword."""
    return LinearCode(n, n, np.eye(n, dtype=np.uint8), np.zeros((0, n), np.uint8), kind="full")


def rlc_new(n: int, k: int, seed: int) -> LinearCode:
    """Systematic random linear code ``G = [I_k | P]`` with fair-coin ``P``.

    ``P`` is drawn from ``numpy.random.default_rng(seed)``, so the same
    ``(n, k, seed)`` always gives the same code.
    """
    n, k = int(n), int(k)
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    P = np.random.default_rng(int(seed)).integers(0, 2, size=(k, n - k), dtype=np.uint8)
    return _systematic_code(n, k, P, "rlc", {"seed": int(seed)})


def _systematic_code(n, k, P, kind, descriptor):
    G = np.hstack([np.eye(k, dtype=np.uint8), P])
    H = np.hstack([P.T, np.eye(n - k, dtype=np.uint8)])
    return LinearCode(n, k, G, H, kind=kind, descriptor=descriptor)


def _poly_to_int(polynomial: int | str | Sequence[int]) -> int:
    if isinstance(polynomial, str):
        return int(polynomial, 0)
    if isinstance(polynomial, (int, np.integer)):
        return int(polynomial)
    # coefficient list, highest degree first
    bits = [int(b) for b in polynomial]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("polynomial coefficients must be 0/1")
    return int("".join(map(str, bits)) or "0", 2)


def poly_mod(value: int, poly: int) -> int:
    """Remainder of GF(2)[x] division; polynomials as ints, bit i = coeff of x^i."""
    deg = poly.bit_length() - 1
    while value.bit_length() - 1 >= deg:
        value ^= poly << (value.bit_length() - 1 - deg)
    return value


def crc_new(n: int, k: int, polynomial: int | str | Sequence[int] = DEFAULT_CRC12) -> LinearCode:
    """Systematic CRC code: codeword = ``[data | data * x^(n-k) mod g]``.

    ``polynomial`` is the full generator including the leading term, as an
    int, a hex string such as ``"0x180f"``, or a 0/1 coefficient list with the
    highest degree first. Data bit 0 is the coefficient of ``x^(n-1)``.
    """
    n, k = int(n), int(k)
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    g = _poly_to_int(polynomial)
    r = n - k
    if g.bit_length() - 1 != r:
        raise ValueError(f"polynomial degree {g.bit_length() - 1} != n - k = {r}")
    if not g & 1:
        raise ValueError("CRC polynomial must have a nonzero constant term")
    P = np.zeros((k, r), dtype=np.uint8)
    for i in range(k):
        rem = poly_mod(1 << (n - 1 - i), g)
        P[i] = [(rem >> (r - 1 - j)) & 1 for j in range(r)]
    return _systematic_code(n, k, P, "crc", {"polynomial": hex(g)})


def crc_remainder(code: LinearCode, c) -> int:
    """CRC remainder of a word of a CRC code, by polynomial long division."""
    if code.kind != "crc":
        raise ValueError("not a CRC code")
    c = check_bits(c, code.n, "codeword")
    value = int("".join(map(str, c)), 2)
    return poly_mod(value, int(code.descriptor["polynomial"], 16))


def code_from_config(cfg: dict[str, Any]) -> LinearCode:
    """Build a code from ``{kind, n, k, seed | polynomial}``; ``kind`` is
    ``rlc``, ``crc`` or ``full`` (``k == n``)."""
    cfg = dict(cfg)
    kind = cfg.pop("kind", None)
    try:
        n, k = int(cfg.pop("n")), int(cfg.pop("k"))
    except KeyError as exc:
        raise ValueError(f"code config missing {exc.args[0]!r}") from None
    if kind == "full":
        allowed, build = set(), lambda: full_space(n)
    elif kind == "rlc":
        allowed, build = {"seed"}, lambda: rlc_new(n, k, cfg.get("seed", 0))
    elif kind == "crc":
        allowed, build = {"polynomial"}, lambda: crc_new(n, k, cfg.get("polynomial", DEFAULT_CRC12))
    else:
        raise ValueError(f"unknown code kind {kind!r} (expected 'rlc', 'crc' or 'full')")
    unknown = set(cfg) - allowed
    if unknown:
        raise ValueError(f"unknown code config keys: {sorted(unknown)}")
    return build()


def encode(code: LinearCode, u) -> np.ndarray:
    """``c = u G`` over GF(2). ``u`` may be a single word or a 2-D batch."""
    u = check_bits(u, code.k, "info word", allow_batch=True)
    return gf2_matmul(u, code.generator)


def syndrome(code: LinearCode, c) -> np.ndarray:
    """``H c^T`` for a word or batch of words (one row per word)."""
    c = check_bits(c, code.n, "codeword", allow_batch=True)
    packed = np.packbits(c, axis=-1)
    prod = code._h_packed & packed[..., None, :]
    return (np.bitwise_count(prod).sum(axis=-1) & 1).astype(np.uint8)


def is_codeword(code: LinearCode, c) -> bool | np.ndarray:
    """True iff ``H c^T = 0``. Returns a bool array for a batch."""
    s = syndrome(code, c)
    return ~s.any(axis=-1) if s.ndim > 1 else not s.any()


def all_codewords(code: LinearCode) -> np.ndarray:
    """Every codeword, ordered by info word as a big-endian integer."""
    if code.k > 20:
        raise ValueError("refusing to enumerate more than 2^20 codewords")
    idx = np.arange(2**code.k, dtype=np.uint32)
    u = ((idx[:, None] >> np.arange(code.k - 1, -1, -1, dtype=np.uint32)) & 1).astype(np.uint8)
    return encode(code, u)
