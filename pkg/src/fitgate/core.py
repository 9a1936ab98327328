"""Foundational types shared by the whole toolkit.

Images are 2-D grayscale intensity grids in [0, 1] stored as float64
arrays, exchanged on disk as binary PGM (P5, maxval 255). All randomness
flows through a SplitMix64 stream so that every artifact is a pure
function of a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO64 = float(2**64)


class PgmError(ValueError):
    """Base class for PGM parse failures."""


class PgmHeaderError(PgmError):
    """Malformed magic number or header fields."""


class PgmMaxvalError(PgmError):
    """Maxval other than 255."""


class PgmPayloadError(PgmError):
    """Payload size does not match the declared dimensions."""


def rng_next(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (value, next state), both 64-bit."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    z = z ^ (z >> 31)
    return z, state


def _mix_u64_array(states: np.ndarray) -> np.ndarray:
    """Vectorized SplitMix64 output function over uint64 states."""
    z = states
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class RandomStream:
    """Deterministic SplitMix64 random stream.

    A stream is a value: its whole future is fixed by `state`. Parallel
    work never shares one stream; use `derive_stream` to give each item
    its own.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        value, self.state = rng_next(self.state)
        return value

    def u64s(self, n: int) -> np.ndarray:
        """n outputs, identical to n successive next_u64() calls."""
        if n < 0:
            raise ValueError("n must be >= 0")
        steps = (np.arange(1, n + 1, dtype=np.uint64)) * np.uint64(_GOLDEN)
        states = np.uint64(self.state) + steps
        out = _mix_u64_array(states)
        self.state = (self.state + n * _GOLDEN) & _MASK64
        return out

    def uniform(self) -> float:
        """Uniform in [0, 1): value / 2^64."""
        return self.next_u64() / _TWO64

    def uniforms(self, n: int) -> np.ndarray:
        return self.u64s(n).astype(np.float64) / _TWO64

    def normal(self) -> float:
        """Standard normal via Box-Muller on two consecutive uniforms."""
        u1 = max(self.uniform(), 1.0 / _TWO64)
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, n: int) -> np.ndarray:
        """n normals, identical to n successive normal() calls."""
        u = self.uniforms(2 * n)
        u1 = np.maximum(u[0::2], 1.0 / _TWO64)
        u2 = u[1::2]
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def randint(self, n: int) -> int:
        """Integer in [0, n). Modulo bias is negligible for n << 2^64."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def shuffle(self, items: np.ndarray) -> np.ndarray:
        """Fisher-Yates shuffle; returns a new array."""
        out = np.array(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.randint(i + 1)
            out[i], out[j] = out[j], out[i]
        return out


def derive_stream(base_seed: int, index: int) -> RandomStream:
    """Independent stream for item `index`, seeded from rng_next(base + index)."""
    value, _ = rng_next((base_seed + index) & _MASK64)
    return RandomStream(value)


@dataclass
class Image:
    """Grayscale image: float64 intensities in [0, 1], row-major (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise ValueError("image must be a non-empty 2-D array")
        lo = float(self.pixels.min())
        hi = float(self.pixels.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"intensities outside [0, 1]: min={lo}, max={hi}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def copy(self) -> "Image":
        return Image(self.pixels.copy())


def clamp01(arr: np.ndarray) -> np.ndarray:
    return np.clip(arr, 0.0, 1.0)


def save_image(image: Image, path) -> None:
    """Write binary PGM (P5, maxval 255); intensity e maps to round(e * 255)."""
    quantized = np.rint(image.pixels * 255.0)
    payload = np.clip(quantized, 0, 255).astype(np.uint8).tobytes()
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + payload)


def _parse_pgm_header(blob: bytes) -> tuple[int, int, int, int]:
    """Returns (width, height, maxval, payload offset). '#' starts a comment."""
    if blob[:2] != b"P5":
        raise PgmHeaderError("not a binary PGM: magic must be 'P5'")
    pos = 2
    fields = []
    while len(fields) < 3:
        if pos >= len(blob):
            raise PgmHeaderError("truncated header")
        ch = blob[pos : pos + 1]
        if ch in b" \t\r\n":
            pos += 1
        elif ch == b"#":
            while pos < len(blob) and blob[pos : pos + 1] != b"\n":
                pos += 1
        elif ch.isdigit():
            start = pos
            while pos < len(blob) and blob[pos : pos + 1].isdigit():
                pos += 1
            fields.append(int(blob[start:pos]))
        else:
            raise PgmHeaderError(f"unexpected byte {ch!r} in header")
    if pos >= len(blob) or blob[pos : pos + 1] not in b" \t\r\n":
        raise PgmHeaderError("missing whitespace after maxval")
    pos += 1
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise PgmHeaderError(f"non-positive dimensions {width}x{height}")
    return width, height, maxval, pos


def load_image(path) -> Image:
    """Read binary PGM; byte b maps to intensity b / 255."""
    with open(path, "rb") as fh:
        blob = fh.read()
    width, height, maxval, offset = _parse_pgm_header(blob)
    if maxval != 255:
        raise PgmMaxvalError(f"maxval must be 255, got {maxval}")
    payload = blob[offset:]
    if len(payload) != width * height:
        raise PgmPayloadError(
            f"expected {width * height} payload bytes, got {len(payload)}"
        )
    data = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / 255.0
    return Image(data.reshape(height, width))


@dataclass
class Stats:
    """Median / mean / population std / count summary of a value sequence."""

    median: float
    mean: float
    std: float
    count: int

    def to_dict(self) -> dict:
        return {
            "median": self.median,
            "mean": self.mean,
            "std": self.std,
            "count": self.count,
        }


def summarize(values) -> Stats:
    """Summary statistics; std is the population standard deviation."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot summarize an empty sequence")
    return Stats(
        median=float(np.median(arr)),
        mean=float(arr.mean()),
        std=float(arr.std()),
        count=int(arr.size),
    )
