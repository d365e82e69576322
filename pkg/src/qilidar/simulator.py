"""Seeded click-stream generation and fast window counting.

Streams are one bit per shot, packed into little-endian 64-bit words so that
a window of ~1e6 shots counts in microseconds via vectorised popcounts.
Generation uses the counter-based Philox engine; identical (parameters,
seed) always reproduce bit-identical streams, and the generator identity is
recorded on the stream for provenance.

The round-trip delay is applied to the whole joint signal outcome (returned
photon plus background) rather than to the returned-photon component alone.
Background clicks are i.i.d. across shots, so the two schemes are
statistically identical, and this one keeps generation single-pass.  Bins
that the shift leaves without a pump partner are drawn from the object-absent
distribution, not zero-filled, to avoid biasing early windows.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .quantum_optics import ClickProbabilities

GENERATOR_NAME = "philox4x64"

_MAGIC = b"QISTRM1\x00"


def _rng_from_seed(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def trial_seeds(seed: int, count: int) -> np.ndarray:
    """Independent per-trial 64-bit seeds spawned from one master seed."""
    return np.random.SeedSequence(int(seed)).generate_state(count, dtype=np.uint64)


@dataclass(frozen=True)
class StreamTruth:
    """Ground truth the stream was generated with."""

    object_present: bool
    distance_m: float | None = None
    delay_shots: int = 0


@dataclass(frozen=True)
class WindowCounts:
    """Counts over one window: x coincidences, y non-coincidences, k idler clicks, n shots."""

    x: int
    y: int
    k: int
    n: int

    def __post_init__(self):
        if not (0 <= self.x <= self.k <= self.n and 0 <= self.y <= self.n - self.k):
            raise ParameterError(
                f"inconsistent window counts x={self.x}, y={self.y}, k={self.k}, n={self.n}"
            )


@dataclass(frozen=True)
class ClickStreams:
    """Paired idler/signal click streams, packed 64 shots per word."""

    idler: np.ndarray  # uint64 words, bit i of word w = shot 64*w + i
    signal: np.ndarray
    length: int
    seed: int
    truth: StreamTruth | None = None
    rng_name: str = GENERATOR_NAME


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    packed = np.packbits(bits, bitorder="little")
    pad = (-packed.size) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
    return packed.view(np.uint64)


def unpack_bits(words: np.ndarray, length: int) -> np.ndarray:
    """Inverse of the internal packing; returns a uint8 0/1 array of ``length``."""
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:length]


def _window_words(words: np.ndarray, start: int, n: int) -> np.ndarray:
    """Bits [start, start+n) re-aligned to bit 0, with the tail masked to zero."""
    if n == 0:
        return np.zeros(0, dtype=np.uint64)
    base, r = divmod(start, 64)
    n_words = (n + 63) // 64
    need = base + n_words + (1 if r else 0)
    if need > words.size:
        words = np.concatenate([words, np.zeros(need - words.size, dtype=np.uint64)])
    if r == 0:
        out = words[base : base + n_words].copy()
    else:
        seg = words[base : base + n_words + 1]
        out = (seg[:-1] >> np.uint64(r)) | (seg[1:] << np.uint64(64 - r))
    tail = n % 64
    if tail:
        out[-1] &= np.uint64((1 << tail) - 1)
    return out


def _popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def generate_streams(
    probs: ClickProbabilities,
    n: int,
    seed: int,
    object_present: bool = True,
    delay: int = 0,
    distance_m: float | None = None,
) -> ClickStreams:
    """Simulate ``n`` shots of paired detector output.

    Object present: each pump pulse i draws an idler bit with probability
    p_i and a signal outcome from the idler-conditioned probability, placed
    at bin i + delay; the first ``delay`` signal bins are object-absent
    draws.  Object absent: both streams are independent Bernoulli sequences.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n!r}")
    if not 0 <= delay <= n:
        raise ParameterError(f"delay must be in [0, {n}], got {delay!r}")
    rng = _rng_from_seed(seed)
    idler = rng.random(n, dtype=np.float32) < np.float32(probs.p_i)
    signal = np.empty(n, dtype=bool)
    if object_present:
        u = rng.random(n, dtype=np.float32)
        if probs.p_h1_i1 >= probs.p_h1_i0:
            outcome = (u < np.float32(probs.p_h1_i0)) | (idler & (u < np.float32(probs.p_h1_i1)))
        else:
            outcome = u < np.where(idler, np.float32(probs.p_h1_i1), np.float32(probs.p_h1_i0))
        if delay:
            signal[delay:] = outcome[: n - delay]
            signal[:delay] = rng.random(delay, dtype=np.float32) < np.float32(probs.p_h0)
        else:
            signal[:] = outcome
    else:
        signal[:] = rng.random(n, dtype=np.float32) < np.float32(probs.p_h0)
    truth = StreamTruth(object_present, distance_m, delay if object_present else 0)
    return ClickStreams(_pack_bits(idler), _pack_bits(signal), n, int(seed), truth)


def generate_transition_streams(
    probs: ClickProbabilities, n_absent: int, n_present: int, seed: int
) -> ClickStreams:
    """Stream where the object appears after ``n_absent`` shots (zero delay).

    Used for rolling-window detection traces; truth is left unset because the
    stream is not stationary.
    """
    if n_absent < 0 or n_present < 0 or n_absent + n_present < 1:
        raise ParameterError("need n_absent, n_present >= 0 with a positive total")
    n = n_absent + n_present
    rng = _rng_from_seed(seed)
    idler = rng.random(n, dtype=np.float32) < np.float32(probs.p_i)
    u = rng.random(n, dtype=np.float32)
    signal = np.empty(n, dtype=bool)
    signal[:n_absent] = u[:n_absent] < np.float32(probs.p_h0)
    tail_i = idler[n_absent:]
    tail_u = u[n_absent:]
    signal[n_absent:] = (tail_u < np.float32(probs.p_h1_i0)) | (
        tail_i & (tail_u < np.float32(probs.p_h1_i1))
    )
    return ClickStreams(_pack_bits(idler), _pack_bits(signal), n, int(seed), None)


def count_window(streams: ClickStreams, offset: int, n: int, delay: int = 0) -> WindowCounts:
    """Window counts pairing idler bin i with signal bin i + delay for i in [offset, offset+n)."""
    if offset < 0 or n < 0 or delay < 0:
        raise ParameterError("offset, n and delay must be nonnegative")
    if offset + n > streams.length or offset + delay + n > streams.length:
        raise ParameterError(
            f"window [{offset}, {offset + n}) at delay {delay} exceeds stream length {streams.length}"
        )
    iw = _window_words(streams.idler, offset, n)
    sw = _window_words(streams.signal, offset + delay, n)
    k = _popcount(iw)
    x = _popcount(iw & sw)
    y = _popcount(~iw & sw)  # tail bits of sw are zero, so the complement tail cannot leak in
    return WindowCounts(x, y, k, n)


def sample_window_counts(
    probs: ClickProbabilities, n: int, seed, object_present: bool = True
) -> WindowCounts:
    """Distributional shortcut for one matched-delay window: nested binomial draws."""
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n!r}")
    if n == 0:
        return WindowCounts(0, 0, 0, 0)
    rng = _rng_from_seed(seed)
    p_c, p_n = (probs.p_h1_i1, probs.p_h1_i0) if object_present else (probs.p_h0, probs.p_h0)
    k = int(rng.binomial(n, probs.p_i))
    x = int(rng.binomial(k, p_c)) if k else 0
    y = int(rng.binomial(n - k, p_n)) if k < n else 0
    return WindowCounts(x, y, k, n)


def write_streams(streams: ClickStreams, path) -> None:
    """Binary dump: magic, n, seed, flags (all little-endian u64), then idler and signal words.

    Flag bits: 0 = truth recorded, 1 = object present, 2 = truth distance
    recorded; bits 32-63 hold the truth distance as float32 bits.
    """
    flags = 0
    if streams.truth is not None:
        flags |= 1
        if streams.truth.object_present:
            flags |= 2
        if streams.truth.distance_m is not None:
            flags |= 4
            (dist_bits,) = struct.unpack("<I", struct.pack("<f", streams.truth.distance_m))
            flags |= dist_bits << 32
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQQ", streams.length, streams.seed, flags))
        fh.write(streams.idler.astype("<u8").tobytes())
        fh.write(streams.signal.astype("<u8").tobytes())


def read_streams(path) -> ClickStreams:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _MAGIC:
            raise ParameterError(f"not a click-stream file (magic {magic!r})")
        length, seed, flags = struct.unpack("<QQQ", fh.read(24))
        n_words = (length + 63) // 64
        idler = np.frombuffer(fh.read(8 * n_words), dtype="<u8").astype(np.uint64)
        signal = np.frombuffer(fh.read(8 * n_words), dtype="<u8").astype(np.uint64)
    truth = None
    if flags & 1:
        distance = None
        if flags & 4:
            (distance,) = struct.unpack("<f", struct.pack("<I", (flags >> 32) & 0xFFFFFFFF))
        truth = StreamTruth(bool(flags & 2), distance)
    return ClickStreams(idler, signal, int(length), int(seed), truth)
