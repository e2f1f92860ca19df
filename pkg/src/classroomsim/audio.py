"""Mono audio containers, WAV I/O, resampling, and power measurement.

Everything downstream works on :class:`AudioBuffer`: immutable mono float
samples at a known rate. The pipeline-wide working rate defaults to
16 kHz (see :data:`DEFAULT_SAMPLE_RATE`).
"""

import os
import struct
import warnings
from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy.io import wavfile
from scipy.signal import firwin, upfirdn

from .errors import (
    ClippingWarning,
    CorruptHeaderError,
    EmptyBufferError,
    InvalidBufferError,
    InvalidRateError,
    IoFailureError,
    MissingFileError,
    UnsupportedEncodingError,
)

DEFAULT_SAMPLE_RATE = 16000

# Energy VAD defaults: 25 ms analysis window advancing in 10 ms hops.
VAD_FRAME_S = 0.025
VAD_HOP_S = 0.010
DEFAULT_VAD_THRESHOLD_DB = -40.0

_PCM16_SCALE = 32768.0


@dataclass(frozen=True)
class AudioBuffer:
    """Immutable mono waveform with its sample rate.

    Samples are float64, nominally within +/-1.0 full scale (mixes may
    exceed it; encoders deal with that). NaN or Inf samples are rejected
    at construction.
    """

    samples: np.ndarray = field(repr=False)
    sample_rate: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidBufferError(f"expected mono samples, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise InvalidBufferError("samples contain NaN or Inf")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise InvalidRateError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return len(self.samples)

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


def _scan_wav_format(path) -> tuple[int, int]:
    """Return (format_tag, bits_per_sample) from the fmt chunk.

    Used only to classify unsupported encodings and corrupt headers
    before handing decoding to scipy.
    """
    with open(path, "rb") as f:
        head = f.read(12)
        if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
            raise CorruptHeaderError(f"{path}: not a RIFF/WAVE file")
        while True:
            chunk = f.read(8)
            if len(chunk) < 8:
                raise CorruptHeaderError(f"{path}: no fmt chunk found")
            cid, size = chunk[:4], struct.unpack("<I", chunk[4:])[0]
            if cid == b"fmt ":
                body = f.read(size)
                if len(body) < 16:
                    raise CorruptHeaderError(f"{path}: truncated fmt chunk")
                tag, _ch, _rate = struct.unpack("<HHI", body[:8])
                bits = struct.unpack("<H", body[14:16])[0]
                if tag == 0xFFFE and size >= 40:
                    # WAVE_FORMAT_EXTENSIBLE: real tag in the SubFormat GUID
                    tag = struct.unpack("<H", body[24:26])[0]
                return tag, bits
            f.seek(size + (size & 1), os.SEEK_CUR)


def read_wav(path) -> AudioBuffer:
    """Read a PCM-16 or IEEE float-32 WAV file as a mono AudioBuffer.

    Multichannel input is averaged down to mono. int16 samples are
    scaled by 1/32768 so -32768 maps exactly to -1.0.
    """
    if not os.path.isfile(path):
        raise MissingFileError(f"no such file: {path}")
    tag, bits = _scan_wav_format(path)
    if not ((tag == 1 and bits == 16) or (tag == 3 and bits == 32)):
        raise UnsupportedEncodingError(
            f"{path}: unsupported WAV encoding (format tag {tag}, {bits}-bit); "
            "only 16-bit PCM and 32-bit IEEE float are accepted"
        )
    try:
        rate, data = wavfile.read(path)
    except (ValueError, struct.error, EOFError) as exc:
        raise CorruptHeaderError(f"{path}: {exc}") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / _PCM16_SCALE
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedEncodingError(f"{path}: unexpected decoded dtype {data.dtype}")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if not np.isfinite(samples).all():
        raise CorruptHeaderError(f"{path}: non-finite samples in file")
    return AudioBuffer(samples, int(rate))


def write_wav(buffer: AudioBuffer, path, encoding: str = "float32") -> int:
    """Write a buffer to a WAV file; returns the clipped-sample count.

    pcm16 saturates samples beyond +/-1.0 (a ClippingWarning reports the
    count); float32 is lossless for float32-representable samples.
    """
    if encoding not in ("pcm16", "float32"):
        raise ValueError(f"encoding must be 'pcm16' or 'float32', got {encoding!r}")
    samples = buffer.samples
    if not np.isfinite(samples).all():
        raise InvalidBufferError("buffer contains NaN or Inf")
    clipped = 0
    if encoding == "pcm16":
        scaled = np.round(samples * _PCM16_SCALE)
        clipped = int(np.count_nonzero((scaled > 32767.0) | (scaled < -32768.0)))
        data = np.clip(scaled, -32768, 32767).astype(np.int16)
        if clipped:
            warnings.warn(f"{path}: saturated {clipped} samples while encoding pcm16", ClippingWarning)
    else:
        data = samples.astype(np.float32)
    try:
        wavfile.write(path, buffer.sample_rate, data)
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc
    return clipped


def wav_duration_seconds(path) -> float:
    """Duration of a WAV file from its header alone (no sample decode)."""
    if not os.path.isfile(path):
        raise MissingFileError(f"no such file: {path}")
    with open(path, "rb") as f:
        head = f.read(12)
        if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
            raise CorruptHeaderError(f"{path}: not a RIFF/WAVE file")
        rate = channels = bits = None
        while True:
            chunk = f.read(8)
            if len(chunk) < 8:
                raise CorruptHeaderError(f"{path}: missing fmt or data chunk")
            cid, size = chunk[:4], struct.unpack("<I", chunk[4:])[0]
            if cid == b"fmt ":
                body = f.read(size)
                _tag, channels, rate = struct.unpack("<HHI", body[:8])
                bits = struct.unpack("<H", body[14:16])[0]
            elif cid == b"data":
                if rate is None:
                    raise CorruptHeaderError(f"{path}: data chunk before fmt chunk")
                frames = size // (channels * (bits // 8))
                return frames / rate
            else:
                f.seek(size + (size & 1), os.SEEK_CUR)


def resample(buffer: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Band-limited polyphase resampling to target_rate.

    Kaiser-windowed sinc with at least 64 taps per polyphase branch and
    roughly 90 dB stopband attenuation. Output length is
    round(len * target/source); identical input rate returns the buffer
    unchanged.
    """
    if not (isinstance(target_rate, (int, np.integer)) and target_rate > 0):
        raise InvalidRateError(f"target_rate must be a positive integer, got {target_rate!r}")
    target_rate = int(target_rate)
    src_rate = buffer.sample_rate
    if target_rate == src_rate:
        return buffer
    g = gcd(src_rate, target_rate)
    up, down = target_rate // g, src_rate // g
    max_rate = max(up, down)
    # half-width rounded to a multiple of `down` so the filter group
    # delay is an integer number of output samples
    half = down * int(np.ceil(32 * max_rate / down))
    taps = firwin(2 * half + 1, 1.0 / max_rate, window=("kaiser", 8.6)) * up
    full = upfirdn(taps, buffer.samples, up, down)
    delay = half // down
    n_out = round(len(buffer) * target_rate / src_rate)
    out = np.zeros(n_out)
    avail = full[delay : delay + n_out]
    out[: len(avail)] = avail
    return AudioBuffer(out, target_rate)


def _frame_rms_db(samples: np.ndarray, start: int, length: int) -> float:
    frame = samples[start : start + length]
    ms = float(np.mean(frame * frame))
    if ms <= 0.0:
        return -np.inf
    return 10.0 * np.log10(ms)


def active_power(buffer: AudioBuffer, vad_threshold_db: float = DEFAULT_VAD_THRESHOLD_DB) -> tuple[float, bool]:
    """Mean-square power over speech-active regions of the buffer.

    The signal is split into contiguous 10 ms hops; a hop counts as
    active when the RMS of the 25 ms window starting at the hop exceeds
    vad_threshold_db (dBFS re 1.0). Returns (power, fell_back) where
    fell_back means no hop was active and full-signal power was used.
    """
    if len(buffer) == 0:
        raise EmptyBufferError("cannot measure power of an empty buffer")
    samples = buffer.samples
    n = len(samples)
    hop = max(1, round(VAD_HOP_S * buffer.sample_rate))
    win = max(hop, round(VAD_FRAME_S * buffer.sample_rate))
    energy = 0.0
    count = 0
    for start in range(0, n, hop):
        if _frame_rms_db(samples, start, win) > vad_threshold_db:
            seg = samples[start : start + hop]
            energy += float(np.sum(seg * seg))
            count += len(seg)
    if count == 0:
        return float(np.mean(samples * samples)), True
    return energy / count, False


def measure_power(
    buffer: AudioBuffer,
    mode: str = "full",
    vad_threshold_db: float = DEFAULT_VAD_THRESHOLD_DB,
) -> float:
    """Mean-square power, over all samples or over speech-active frames."""
    if len(buffer) == 0:
        raise EmptyBufferError("cannot measure power of an empty buffer")
    if mode == "full":
        return float(np.mean(buffer.samples * buffer.samples))
    if mode == "active":
        power, _ = active_power(buffer, vad_threshold_db)
        return power
    raise ValueError(f"mode must be 'full' or 'active', got {mode!r}")
