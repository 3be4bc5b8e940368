"""ORBGRAND-AI: soft-detection GRAND over blocks of correlated BPSK symbols.

The received word is cut into blocks of ``b`` symbols. Each block is
demodulated jointly using the Gauss-Markov block covariance, and every
alternative block value becomes a substitution candidate whose reliability
is its log-likelihood gap to the block's hard decision. Candidates are
rank-ordered and ORBGRAND patterns over the ranks are tried until a pattern
without two substitutions in the same block yields a codeword.

Symbol tuples are indexed canonically: index ``j`` of ``chi^b`` carries bit
``(j >> (b - 1 - r)) & 1`` on symbol ``r``, so index 0 is all +1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .channel import BlockCovariance, GaussMarkovChannel, block_covariance
from .codes import LinearCode
from .orbgrand_core import Pattern, RankPermutation, advance
from .validation import check_block_size, check_positive, check_rho, check_signal

MAX_BLOCK_ALPHABET = 2**16
DEFAULT_TAU = 10**6
PENALTY_FLOOR = 1e-12


class DecodeStatus(str, enum.Enum):
    FOUND = "found"
    ABANDONED = "abandoned"


@dataclass(frozen=True, eq=False)
class DecodeResult:
    codeword: np.ndarray | None
    guesses: int
    status: DecodeStatus

    @property
    def found(self) -> bool:
        return self.status is DecodeStatus.FOUND


def symbol_alphabet(b: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``2^b`` BPSK block values in canonical order, as ``(symbols, bits)``."""
    if 2**b > MAX_BLOCK_ALPHABET:
        raise ValueError(f"block alphabet 2^{b} exceeds the cap of {MAX_BLOCK_ALPHABET}")
    idx = np.arange(2**b)
    bits = ((idx[:, None] >> np.arange(b - 1, -1, -1)) & 1).astype(np.uint8)
    return 1.0 - 2.0 * bits, bits


def partition_blocks(y, b: int) -> np.ndarray:
    """Split ``n_s`` symbols into ``n_s / b`` contiguous blocks (rows)."""
    y = check_signal(y)
    if y.ndim != 1:
        raise ValueError("expected a single received word")
    b = check_block_size(b, y.shape[0])
    return y.reshape(-1, b)


# -- numba kernels -----------------------------------------------------------


@numba.njit(cache=True)
def _block_scores(yr, precision, symbols, energy):
    # Log-likelihood of every block value up to a per-block constant:
    # s^T P y - s^T P s / 2 for each block row of yr.
    nb, b = yr.shape
    m = symbols.shape[0]
    out = np.empty((nb, m))
    v = np.empty(b)
    for i in range(nb):
        for r in range(b):
            acc = 0.0
            for q in range(b):
                acc += precision[r, q] * yr[i, q]
            v[r] = acc
        for t in range(m):
            acc = 0.0
            for r in range(b):
                acc += symbols[t, r] * v[r]
            out[i, t] = acc - energy[t]
    return out


@numba.njit(cache=True)
def _candidates(scores):
    # Hard decisions (first maximum wins) and the block-major candidate list.
    nb, m = scores.shape
    hard = np.empty(nb, np.int64)
    mu = nb * (m - 1)
    cblock = np.empty(mu, np.int64)
    csym = np.empty(mu, np.int64)
    pen = np.empty(mu)
    pos = 0
    for i in range(nb):
        best = 0
        for t in range(1, m):
            if scores[i, t] > scores[i, best]:
                best = t
        hard[i] = best
        for t in range(m):
            if t == best:
                continue
            p = scores[i, best] - scores[i, t]
            cblock[pos] = i
            csym[pos] = t
            pen[pos] = 0.0 if p < 1e-12 else p
            pos += 1
    return hard, cblock, csym, pen


@numba.njit(cache=True)
def _search(order, cblock, cdelta, hard_syn, n_blocks, tau, max_weight, parts):
    # Algorithm loop: d counts every fetched pattern, conflicted ones included.
    # Returns (d, cardinality of the winning pattern or -1).
    mu = order.shape[0]
    nw = hard_syn.shape[0]
    state = np.zeros(2, np.int64)
    stamp = np.full(n_blocks, -1, np.int64)
    syn = np.empty(nw, np.uint64)
    d = 0
    while d < tau:
        if d > 0 and not advance(parts, state, mu, max_weight):
            return d, -1
        d += 1
        c = state[1]
        for w in range(nw):
            syn[w] = hard_syn[w]
        conflict = False
        for j in range(c):
            cand = order[parts[j] - 1]
            blk = cblock[cand]
            if stamp[blk] == d:
                conflict = True
                break
            stamp[blk] = d
            for w in range(nw):
                syn[w] ^= cdelta[cand, w]
        if conflict:
            continue
        zero = True
        for w in range(nw):
            if syn[w] != 0:
                zero = False
                break
        if zero:
            return d, c
    return d, -1


@numba.njit(cache=True)
def _decode_one(yr, precision, symbols, energy, sym_bits, block_syn, tau, out_bits):
    nb, b = yr.shape
    nw = block_syn.shape[2]
    scores = _block_scores(yr, precision, symbols, energy)
    hard, cblock, csym, pen = _candidates(scores)
    mu = pen.shape[0]
    order = np.argsort(pen, kind="mergesort")
    hard_syn = np.zeros(nw, np.uint64)
    for i in range(nb):
        for w in range(nw):
            hard_syn[w] ^= block_syn[i, hard[i], w]
    cdelta = np.empty((mu, nw), np.uint64)
    for c in range(mu):
        i = cblock[c]
        for w in range(nw):
            cdelta[c, w] = block_syn[i, csym[c], w] ^ block_syn[i, hard[i], w]
    parts = np.zeros(max(mu, 1), np.int64)
    max_weight = mu * (mu + 1) // 2
    d, card = _search(order, cblock, cdelta, hard_syn, nb, tau, max_weight, parts)
    sym = hard.copy()
    for j in range(max(card, 0)):
        cand = order[parts[j] - 1]
        sym[cblock[cand]] = csym[cand]
    for i in range(nb):
        for r in range(b):
            out_bits[i * b + r] = sym_bits[sym[i], r]
    return d, card >= 0


@numba.njit(cache=True)
def _decode_many(yr_all, precision, symbols, energy, sym_bits, block_syn, tau, out_bits, guesses, found):
    nb = block_syn.shape[0]
    b = sym_bits.shape[1]
    for t in range(yr_all.shape[0]):
        d, ok = _decode_one(
            yr_all[t].reshape(nb, b), precision, symbols, energy, sym_bits, block_syn, tau, out_bits[t]
        )
        guesses[t] = d
        found[t] = ok


def _block_syndromes(code: LinearCode, b: int, bits: np.ndarray) -> np.ndarray:
    # block_syn[i, t] = syndrome contribution of block i taking value t
    col = code.column_syndromes()
    nb = code.n // b
    out = np.zeros((nb, bits.shape[0], col.shape[1]), dtype=np.uint64)
    for i in range(nb):
        for r in range(b):
            ones = bits[:, r].astype(bool)
            out[i, ones] ^= col[i * b + r]
    return out


# -- functional API ----------------------------------------------------------


def block_log_likelihoods(y_block, cov: BlockCovariance) -> np.ndarray:
    """Log-likelihood ``log p(y | t)`` of every block value ``t`` (canonical
    order), dropping the normalizing constant common to all ``t``. Only the
    real component enters; the imaginary part is identical across BPSK
    candidates."""
    y = check_signal(y_block, cov.b, "block")
    if y.ndim != 1:
        raise ValueError("expected a single block")
    yr = np.ascontiguousarray(np.real(y), dtype=np.float64)
    symbols, _ = symbol_alphabet(cov.b)
    energy = 0.5 * np.einsum("tr,rq,tq->t", symbols, cov.precision, symbols)
    scores = _block_scores(yr[None, :], cov.precision, symbols, energy)[0]
    return scores - 0.5 * yr @ cov.precision @ yr


def hard_demod_block(likelihoods) -> int:
    """Canonical index of the most likely block value; ties go to the
    earliest index."""
    ll = np.asarray(likelihoods, dtype=np.float64)
    if ll.size == 0:
        raise ValueError("empty likelihood map")
    return int(np.argmax(ll))


@dataclass(frozen=True, eq=False)
class CandidateTable:
    """Hard decisions and all ``mu = n_blocks * (2^b - 1)`` substitution
    candidates (block-major, canonical order within a block)."""

    b: int
    hard: np.ndarray
    blocks: np.ndarray
    symbols: np.ndarray
    penalties: np.ndarray
    ranks: RankPermutation

    @property
    def mu(self) -> int:
        return len(self.penalties)

    @property
    def n_blocks(self) -> int:
        return len(self.hard)

    def candidate_at(self, rank: int) -> int:
        """Candidate index holding 1-based ``rank``."""
        return int(self.ranks.order[rank - 1])


def build_candidate_table(y, b: int, channel: GaussMarkovChannel) -> CandidateTable:
    yr = np.ascontiguousarray(np.real(partition_blocks(y, b)), dtype=np.float64)
    cov = block_covariance(b, channel)
    symbols, _ = symbol_alphabet(b)
    energy = 0.5 * np.einsum("tr,rq,tq->t", symbols, cov.precision, symbols)
    hard, cblock, csym, pen = _candidates(_block_scores(yr, cov.precision, symbols, energy))
    order = np.argsort(pen, kind="stable")
    return CandidateTable(b, hard, cblock, csym, pen, RankPermutation(order, pen[order]))


def substitute_and_demap(table: CandidateTable, pattern: Pattern | tuple) -> np.ndarray | None:
    """Bits of the hard decisions with the pattern's candidates substituted,
    or None when two ranks address the same block."""
    ranks = pattern.ranks if isinstance(pattern, Pattern) else tuple(pattern)
    sym = table.hard.copy()
    seen = set()
    for r in ranks:
        if not 1 <= r <= table.mu:
            raise ValueError(f"rank {r} outside [1, {table.mu}]")
        cand = table.candidate_at(r)
        blk = int(table.blocks[cand])
        if blk in seen:
            return None
        seen.add(blk)
        sym[blk] = table.symbols[cand]
    _, bits = symbol_alphabet(table.b)
    return bits[sym].reshape(-1)


def decode(y, code: LinearCode, channel: GaussMarkovChannel, b: int, tau: int = DEFAULT_TAU) -> DecodeResult:
    """Decode one received word; see :class:`OrbgrandAIDecoder`."""
    dec = OrbgrandAIDecoder(code, rho=channel.rho, sigma2=channel.sigma2, block_size=b, tau=tau).fit()
    return dec.decode(y)


# -- estimator ---------------------------------------------------------------


class OrbgrandAIDecoder(BaseEstimator):
    """Block-likelihood ORBGRAND decoder with a scikit-learn estimator API.

    Parameters
    ----------
    code : LinearCode
        Code whose parity check serves as the codebook membership test.
    rho, sigma2 : float
        Gauss-Markov correlation coefficient and per-real-dimension noise
        variance known to the receiver.
    block_size : int
        Symbols per jointly demodulated block; must divide the code length.
    tau : int
        Abandonment threshold on the number of fetched patterns.

    ``fit`` precomputes the block precision matrix and per-block syndrome
    tables; ``predict`` maps received words (rows, real or complex) to
    decoded codewords. Abandoned rows are returned as the hard decision.
    """

    def __init__(self, code=None, rho=0.0, sigma2=1.0, block_size=4, tau=DEFAULT_TAU):
        self.code = code
        self.rho = rho
        self.sigma2 = sigma2
        self.block_size = block_size
        self.tau = tau

    def fit(self, X=None, y=None):
        if not isinstance(self.code, LinearCode):
            raise TypeError("code must be a LinearCode")
        n = self.code.n
        b = check_block_size(self.block_size, n)
        check_rho(self.rho)
        check_positive(self.sigma2, "sigma2")
        if int(self.tau) < 1:
            raise ValueError("tau must be >= 1")
        if X is not None:
            check_signal(X, n)
        self.covariance_ = block_covariance(b, GaussMarkovChannel(self.rho, self.sigma2))
        self.symbols_, self.symbol_bits_ = symbol_alphabet(b)
        self.energy_ = 0.5 * np.einsum("tr,rq,tq->t", self.symbols_, self.covariance_.precision, self.symbols_)
        self.block_syndromes_ = _block_syndromes(self.code, b, self.symbol_bits_)
        self.n_blocks_ = n // b
        self.mu_ = self.n_blocks_ * (2**b - 1)
        self.n_features_in_ = n
        return self

    def decode_batch(self, X):
        """Decode rows of ``X``; returns ``(codewords, guesses, found)``."""
        check_is_fitted(self, "covariance_")
        X = check_signal(X, self.code.n)
        yr = np.ascontiguousarray(np.real(np.atleast_2d(X)), dtype=np.float64)
        T = yr.shape[0]
        bits = np.empty((T, self.code.n), dtype=np.uint8)
        guesses = np.empty(T, dtype=np.int64)
        found = np.empty(T, dtype=np.bool_)
        _decode_many(
            yr,
            np.ascontiguousarray(self.covariance_.precision),
            self.symbols_,
            self.energy_,
            self.symbol_bits_,
            self.block_syndromes_,
            int(self.tau),
            bits,
            guesses,
            found,
        )
        return bits, guesses, found

    def decode(self, y) -> DecodeResult:
        y = check_signal(y, getattr(self, "n_features_in_", None))
        if y.ndim != 1:
            raise ValueError("decode takes a single received word; use decode_batch for rows")
        bits, guesses, found = self.decode_batch(y[None, :])
        status = DecodeStatus.FOUND if found[0] else DecodeStatus.ABANDONED
        return DecodeResult(bits[0] if found[0] else None, int(guesses[0]), status)

    def predict(self, X):
        X = np.asarray(X)
        bits, _, _ = self.decode_batch(X)
        return bits if X.ndim == 2 else bits[0]

    def score(self, X, y):
        """Fraction of rows decoded to the reference codeword ``y`` (1 - BLER)."""
        pred = np.atleast_2d(self.predict(X))
        return float(np.mean(np.all(pred == np.atleast_2d(y), axis=1)))
