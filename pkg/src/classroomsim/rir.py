"""Room impulse response synthesis for shoebox rooms.

Early reflections come from mirror-image source enumeration with
per-band wall losses; the late field is a stochastic tail shaped by the
Sabine reverberation time per band, spliced onto the early part with an
equal-power crossfade. Occlusion by furniture attenuates the direct
path; sources have a cardioid-family directivity pattern.
"""

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import ceil, floor, sqrt

import numpy as np
from scipy.signal import fftconvolve, firwin

from .audio import AudioBuffer
from .errors import (
    ConfigError,
    DegenerateSegmentError,
    InsufficientRangeError,
    ListenerOutsideRoomError,
    NoDecayError,
    SourceOutsideRoomError,
)
from .room import N_BANDS, BAND_CENTERS_HZ, RoomModel, sabine_rt60

SPEED_OF_SOUND = 343.0
MIN_DISTANCE = 0.1  # m, floor for the 1/d amplitude law

# fraction of specular energy lost to scattering per bounce
SPECULAR_SCATTER_LOSS = 0.5

FRAC_DELAY_HALF = 16  # 32-tap windowed-sinc fractional delay

SPLICE_FADE_S = 0.010  # equal-power crossfade into the stochastic tail
MATCH_WINDOW_S = 0.020  # early-part window the tail level is matched to
TAIL_RT60_CAP_S = 10.0
TAIL_MAX_DURATION_S = 4.0


@dataclass(frozen=True)
class SourceSpec:
    """Directive point source: position, frontal axis, cardioid shape."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float] = (1.0, 0.0, 0.0)
    directivity_alpha: float = 1.0
    gain: float = 1.0

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        ori = np.asarray(self.orientation, dtype=np.float64)
        norm = float(np.linalg.norm(ori))
        if abs(norm - 1.0) > 1e-6:
            raise ConfigError(f"source orientation must be a unit vector, |v| = {norm:.8f}")
        if not 0.0 <= self.directivity_alpha <= 1.0:
            raise ConfigError(f"directivity_alpha must lie in [0, 1], got {self.directivity_alpha}")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", tuple(float(v) for v in ori))


@dataclass(frozen=True)
class ImageSource:
    """Mirror image of a source with accumulated per-band wall losses."""

    position: tuple[float, float, float]
    order: int
    band_gains: np.ndarray
    reflection_counts: tuple[int, int, int] = (0, 0, 0)

    def to_dict(self) -> dict:
        return {
            "position": list(self.position),
            "order": self.order,
            "band_gains": [float(g) for g in self.band_gains],
            "reflection_counts": list(self.reflection_counts),
        }


@dataclass(frozen=True)
class RirParams:
    """Synthesis controls for one impulse response."""

    sample_rate: int = 16000
    max_order: int = 3
    speed_of_sound: float = SPEED_OF_SOUND
    mixing_time_ms: float | None = None  # default 2*sqrt(volume) ms
    tail_enabled: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.max_order <= 8:
            raise ConfigError(f"max_order must lie in [0, 8], got {self.max_order}")
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.speed_of_sound <= 0:
            raise ConfigError(f"speed_of_sound must be positive, got {self.speed_of_sound}")

    def mixing_time_s(self, room: RoomModel) -> float:
        if self.mixing_time_ms is not None:
            return self.mixing_time_ms / 1000.0
        return 2.0 * sqrt(room.volume) / 1000.0


def _axis_positions_and_hits(coord: float, length: float, max_order: int):
    """Per-axis image coordinates and wall-hit counts for q in [-N, N].

    Index q even mirrors to q*L + x, odd to q*L + (L - x); |q| is the
    reflection count on this axis, split ceil/floor between the wall the
    ray hits first (the + wall for q > 0, the - wall for q < 0).
    """
    qs = np.arange(-max_order, max_order + 1)
    pos = np.where(qs % 2 == 0, qs * length + coord, qs * length + (length - coord))
    hits_pos = np.where(qs > 0, np.ceil(qs / 2), np.floor(-qs / 2)).astype(int)
    hits_neg = np.where(qs < 0, np.ceil(-qs / 2), np.floor(qs / 2)).astype(int)
    return pos, hits_neg, hits_pos


def _face_reflection_factor(room: RoomModel, face: str) -> np.ndarray:
    mat = room.wall_materials[face]
    return (1.0 - mat.absorption) * (1.0 - mat.scattering * SPECULAR_SCATTER_LOSS)


def image_sources(room: RoomModel, source: SourceSpec, max_order: int) -> list[ImageSource]:
    """All mirror images with |i|+|j|+|k| <= max_order for the shoebox.

    Each image carries the product of per-bounce specular reflection
    factors (1 - absorption) * (1 - scattering * 0.5) for the faces it
    reflected off, in each octave band.
    """
    if not room.contains_point(source.position):
        raise SourceOutsideRoomError(f"source at {source.position} is outside the room")
    if max_order < 0:
        raise ConfigError(f"max_order must be >= 0, got {max_order}")
    dims = room.dimensions
    axes = []
    for axis, axis_name in enumerate("xyz"):
        pos, hits_neg, hits_pos = _axis_positions_and_hits(source.position[axis], dims[axis], max_order)
        r_neg = _face_reflection_factor(room, f"-{axis_name}")
        r_pos = _face_reflection_factor(room, f"+{axis_name}")
        gains = (r_neg[None, :] ** hits_neg[:, None]) * (r_pos[None, :] ** hits_pos[:, None])
        axes.append((pos, gains))
    images = []
    n = max_order
    for qx, qy, qz in product(range(-n, n + 1), repeat=3):
        order = abs(qx) + abs(qy) + abs(qz)
        if order > n:
            continue
        ix, iy, iz = qx + n, qy + n, qz + n
        position = (float(axes[0][0][ix]), float(axes[1][0][iy]), float(axes[2][0][iz]))
        gains = axes[0][1][ix] * axes[1][1][iy] * axes[2][1][iz]
        images.append(ImageSource(position, order, gains, (qx, qy, qz)))
    return images


def dump_image_sources(images: list[ImageSource], path) -> None:
    """Debug dump of an image-source list as JSON."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump([img.to_dict() for img in images], f, indent=2)


def occlusion_factor(room: RoomModel, a, b) -> np.ndarray:
    """Per-band transmission product of furniture boxes cut by segment a-b.

    Grazing contact with a box face counts as a hit; an unobstructed
    segment returns 1.0 in every band.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if np.array_equal(a, b):
        raise DegenerateSegmentError("occlusion segment endpoints coincide")
    d = b - a
    factor = np.ones(N_BANDS)
    eps = 1e-12
    for box in room.furniture:
        lo, hi = box.min_corner, box.max_corner
        tmin, tmax = 0.0, 1.0
        hit = True
        for axis in range(3):
            if abs(d[axis]) < eps:
                if a[axis] < lo[axis] - eps or a[axis] > hi[axis] + eps:
                    hit = False
                    break
            else:
                t1 = (lo[axis] - a[axis]) / d[axis]
                t2 = (hi[axis] - a[axis]) / d[axis]
                if t1 > t2:
                    t1, t2 = t2, t1
                tmin = max(tmin, t1)
                tmax = min(tmax, t2)
                if tmin > tmax + eps:
                    hit = False
                    break
        if hit:
            factor = factor * box.material.transmission
    return factor


def directivity_gain(source: SourceSpec, toward) -> float:
    """Cardioid-family gain alpha + (1 - alpha) cos(theta), floored at 0."""
    direction = np.asarray(toward, dtype=np.float64) - np.asarray(source.position)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        raise DegenerateSegmentError("target point coincides with the source position")
    cos_theta = float(np.dot(np.asarray(source.orientation), direction / norm))
    alpha = source.directivity_alpha
    return max(0.0, alpha + (1.0 - alpha) * cos_theta)


@lru_cache(maxsize=8)
def _band_filterbank(sample_rate: int) -> tuple[np.ndarray, int]:
    """Linear-phase complementary 6-band filterbank; sums to a pure delay.

    Bands are built as differences of lowpass prototypes with crossovers
    at the geometric edges of the octave bands, so the reconstruction is
    exact and every band shares one group delay.
    """
    numtaps = 2 * round(0.016 * sample_rate) + 1
    delay = (numtaps - 1) // 2
    nyquist = sample_rate / 2.0
    edges = [min(c * sqrt(2.0), 0.99 * nyquist) for c in BAND_CENTERS_HZ[:-1]]
    lowpasses = [firwin(numtaps, edge, fs=sample_rate) for edge in edges]
    bands = np.zeros((N_BANDS, numtaps))
    bands[0] = lowpasses[0]
    for b in range(1, N_BANDS - 1):
        bands[b] = lowpasses[b] - lowpasses[b - 1]
    impulse = np.zeros(numtaps)
    impulse[delay] = 1.0
    bands[N_BANDS - 1] = impulse - lowpasses[-1]
    bands.flags.writeable = False
    return bands, delay


def _frac_delay_kernel(frac: float) -> np.ndarray:
    """32-tap Blackman-windowed sinc centered at offset `frac` in [0, 1)."""
    x = np.arange(-FRAC_DELAY_HALF + 1, FRAC_DELAY_HALF + 1) - frac
    w = 0.42 + 0.5 * np.cos(np.pi * x / FRAC_DELAY_HALF) + 0.08 * np.cos(2 * np.pi * x / FRAC_DELAY_HALF)
    return np.sinc(x) * np.clip(w, 0.0, None)


def _filter_bands(band_signals: np.ndarray, sample_rate: int) -> np.ndarray:
    """Apply the filterbank per band and remove the common group delay."""
    filters, delay = _band_filterbank(sample_rate)
    n = band_signals.shape[1]
    out = np.empty_like(band_signals)
    for b in range(N_BANDS):
        out[b] = fftconvolve(band_signals[b], filters[b])[delay : delay + n]
    return out


def synthesize_rir(room: RoomModel, source: SourceSpec, listener, params: RirParams) -> AudioBuffer:
    """Render the impulse response between a source and a listener point.

    Early part: one fractionally delayed tap per mirror image, amplitude
    gain/max(d, 0.1) times directivity, with furniture occlusion on the
    direct path only, realized through the 6-band filterbank. Late part:
    per-band noise decaying at the Sabine rate, level-matched to the
    last 20 ms of the early part and spliced with a 10 ms equal-power
    crossfade at the mixing time. Bit-deterministic for a fixed seed.
    """
    listener = np.asarray(listener, dtype=np.float64)
    if not room.contains_point(source.position):
        raise SourceOutsideRoomError(f"source at {source.position} is outside the room")
    if not room.contains_point(listener):
        raise ListenerOutsideRoomError(f"listener at {listener.tolist()} is outside the room")
    fs = params.sample_rate
    c = params.speed_of_sound

    images = image_sources(room, source, params.max_order)
    positions = np.array([img.position for img in images])
    dists = np.linalg.norm(positions - listener[None, :], axis=1)
    delays = dists / c * fs
    direct_delay_s = float(np.linalg.norm(np.asarray(source.position) - listener)) / c

    fade_half = SPLICE_FADE_S / 2.0
    if params.tail_enabled:
        t_splice = max(params.mixing_time_s(room), direct_delay_s + 0.002)
        early_end = int(ceil((t_splice + fade_half) * fs)) + FRAC_DELAY_HALF + 1
    else:
        t_splice = None
        early_end = int(ceil(delays.max())) + 2 * FRAC_DELAY_HALF + 2

    occlusion = occlusion_factor(room, source.position, listener) if room.furniture else np.ones(N_BANDS)
    mirror_sign = np.where(np.array([img.reflection_counts for img in images]) % 2 == 0, 1.0, -1.0)

    early_bands = np.zeros((N_BANDS, early_end))
    src_pos = np.asarray(source.position)
    for idx, img in enumerate(images):
        tau = delays[idx]
        i0 = floor(tau)
        if i0 - FRAC_DELAY_HALF + 1 >= early_end:
            continue
        direction = listener - positions[idx]
        norm = np.linalg.norm(direction)
        if norm > 0:
            oriented = np.asarray(source.orientation) * mirror_sign[idx]
            cos_theta = float(np.dot(oriented, direction / norm))
        else:
            cos_theta = 1.0
        alpha = source.directivity_alpha
        dir_gain = max(0.0, alpha + (1.0 - alpha) * cos_theta)
        amp = source.gain * dir_gain / max(dists[idx], MIN_DISTANCE)
        gains = img.band_gains * amp
        if img.order == 0:
            gains = gains * occlusion
        kernel = _frac_delay_kernel(tau - i0)
        lo = i0 - FRAC_DELAY_HALF + 1
        k_lo = max(0, -lo)
        k_hi = min(len(kernel), early_end - lo)
        if k_hi <= k_lo:
            continue
        early_bands[:, lo + k_lo : lo + k_hi] += gains[:, None] * kernel[None, k_lo:k_hi]

    early_bands = _filter_bands(early_bands, fs)
    early = early_bands.sum(axis=0)

    if not params.tail_enabled:
        return AudioBuffer(early, fs)

    rt60 = np.minimum(sabine_rt60(room), TAIL_RT60_CAP_S)
    tail_dur = min(1.15 * float(rt60.max()) + 0.1, TAIL_MAX_DURATION_S)
    n_total = int(ceil((t_splice + fade_half + tail_dur) * fs))

    rng = np.random.default_rng(params.seed)
    noise_bands = _filter_bands(np.tile(rng.standard_normal(n_total), (N_BANDS, 1)), fs)
    t = np.arange(n_total) / fs
    splice_idx = int(round(t_splice * fs))
    match_lo = max(0, splice_idx - int(round(MATCH_WINDOW_S * fs)))
    tail = np.zeros(n_total)
    for b in range(N_BANDS):
        envelope = np.exp(-6.91 * (t - t_splice) / rt60[b])
        shaped = noise_bands[b] * envelope
        e_early = float(np.mean(early_bands[b, match_lo:splice_idx] ** 2)) if splice_idx > match_lo else 0.0
        e_tail = float(np.mean(shaped[match_lo:splice_idx] ** 2)) if splice_idx > match_lo else 0.0
        scale = sqrt(e_early / e_tail) if e_tail > 0 and e_early > 0 else 0.0
        tail += shaped * scale

    fade_lo = max(0, int(round((t_splice - fade_half) * fs)))
    fade_hi = min(n_total, int(round((t_splice + fade_half) * fs)))
    w_early = np.zeros(n_total)
    w_early[:fade_lo] = 1.0
    if fade_hi > fade_lo:
        theta = np.linspace(0.0, np.pi / 2.0, fade_hi - fade_lo, endpoint=False)
        w_early[fade_lo:fade_hi] = np.cos(theta)
    w_tail = np.sqrt(np.clip(1.0 - w_early**2, 0.0, 1.0))

    out = tail * w_tail
    n_early = min(early_end, n_total)
    out[:n_early] += early[:n_early] * w_early[:n_early]
    return AudioBuffer(out, fs)


def estimate_rt60(rir: AudioBuffer) -> float:
    """RT60 from Schroeder backward integration of the squared response.

    Fits a line to the energy-decay curve between -5 and -25 dB and
    extrapolates the 20 dB fall to 60 dB. Raises NoDecayError when the
    curve does not actually decay (the -5 dB point sits in the tail half
    of the signal, where backward integration of a stationary signal
    produces an artificial slope, or the fitted slope is >= 0) and
    InsufficientRangeError when the curve never reaches -25 dB.
    """
    power = rir.samples**2
    nonzero = np.nonzero(power)[0]
    if len(nonzero) == 0:
        raise InsufficientRangeError("response carries no energy")
    power = power[: nonzero[-1] + 1]
    edc = np.cumsum(power[::-1])[::-1]
    edc_db = 10.0 * np.log10(edc / edc[0])
    below5 = np.nonzero(edc_db <= -5.0)[0]
    below25 = np.nonzero(edc_db <= -25.0)[0]
    if len(below25) == 0 or len(below5) == 0:
        raise InsufficientRangeError("energy-decay curve never reaches -25 dB")
    i5, i25 = below5[0], below25[0]
    if i5 > 0.5 * len(edc_db):
        raise NoDecayError("decay region is dominated by the stationary tail of the integration")
    if i25 <= i5 + 1:
        i25 = min(i5 + 2, len(edc_db))
    times = np.arange(i5, i25) / rir.sample_rate
    segment = edc_db[i5:i25]
    slope = np.polyfit(times, segment, 1)[0]
    if slope >= 0:
        raise NoDecayError("energy-decay curve is not decreasing")
    return float(-60.0 / slope)
