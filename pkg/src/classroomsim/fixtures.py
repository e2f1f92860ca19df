"""Deterministic synthetic audio for tests and demo pipelines.

Child and adult voices are separated by fundamental-frequency band
(250-400 Hz vs 85-180 Hz) so role-sensitive pipeline behavior can be
exercised without any real speech data.
"""

import json
import os
from dataclasses import dataclass

import numpy as np
from scipy.signal import chirp as _chirp

from .audio import AudioBuffer, write_wav
from .errors import InvalidSpecError, IoFailureError

FIXTURE_KINDS = ("tone", "chirp", "noise_burst", "synthetic_babble_voice", "impulse_train", "silence")
VOICED_KINDS = ("tone", "chirp", "synthetic_babble_voice")

CHILD_F0_RANGE = (250.0, 400.0)
ADULT_F0_RANGE = (85.0, 180.0)

_VOCAB = (
    "the a this that and then because look we you they it is was has can
".split()
    + "water light sound energy plant rock number shape angle force table book question answer idea".split()
)


@dataclass(frozen=True)
class FixtureSpec:
    kind: str
    duration_s: float
    fundamental_hz: float = 220.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in FIXTURE_KINDS:
            raise InvalidSpecError(f"unknown fixture kind {self.kind!r}")
        if self.duration_s <= 0:
            raise InvalidSpecError(f"duration_s must be positive, got {self.duration_s}")
        if self.kind in VOICED_KINDS and not 60.0 <= self.fundamental_hz <= 500.0:
            raise InvalidSpecError(
                f"fundamental_hz must lie in [60, 500] for voiced kinds, got {self.fundamental_hz}"
            )
        if self.kind == "impulse_train" and self.fundamental_hz <= 0:
            raise InvalidSpecError("impulse_train needs a positive repetition rate")


def _smooth_noise(n: int, fs: int, rate_hz: float, rng) -> np.ndarray:
    """Piecewise-linear noise with roughly rate_hz wiggles per second."""
    knots = max(2, int(n / fs * rate_hz) + 2)
    values = rng.standard_normal(knots)
    return np.interp(np.arange(n), np.linspace(0, n - 1, knots), values)


def _babble_voice(n: int, fs: int, f0: float, rng) -> np.ndarray:
    t = np.arange(n) / fs
    inst_f = f0 * (1.0 + 0.03 * _smooth_noise(n, fs, 3.0, rng))
    phase = 2.0 * np.pi * np.cumsum(inst_f) / fs
    n_harmonics = max(1, min(10, int(0.45 * fs / f0)))
    sig = np.zeros(n)
    for k in range(1, n_harmonics + 1):
        sig += np.sin(k * phase + rng.uniform(0, 2 * np.pi)) / k
    syllabic = 0.55 - 0.45 * np.cos(2.0 * np.pi * 4.0 * t + rng.uniform(0, 2 * np.pi))
    sig *= np.clip(syllabic, 0.0, None) ** 1.5
    peak = np.abs(sig).max()
    return 0.5 * sig / peak if peak > 0 else sig


def generate_fixture(spec: FixtureSpec, sample_rate: int = 16000) -> AudioBuffer:
    """Render a fixture waveform; bit-identical for identical (spec, seed)."""
    n = round(spec.duration_s * sample_rate)
    rng = np.random.default_rng(spec.seed)
    t = np.arange(n) / sample_rate
    if spec.kind == "silence":
        samples = np.zeros(n)
    elif spec.kind == "tone":
        samples = 0.5 * np.sin(2.0 * np.pi * spec.fundamental_hz * t)
    elif spec.kind == "chirp":
        samples = 0.5 * _chirp(t, spec.fundamental_hz, spec.duration_s, 2.0 * spec.fundamental_hz)
    elif spec.kind == "noise_burst":
        samples = 0.3 * rng.standard_normal(n)
        fade = min(n // 2, round(0.01 * sample_rate))
        if fade > 0:
            ramp = np.linspace(0.0, 1.0, fade)
            samples[:fade] *= ramp
            samples[-fade:] *= ramp[::-1]
    elif spec.kind == "impulse_train":
        samples = np.zeros(n)
        period = max(1, round(sample_rate / spec.fundamental_hz))
        samples[::period] = 1.0
    else:
        samples = _babble_voice(n, sample_rate, spec.fundamental_hz, rng)
    return AudioBuffer(samples, sample_rate)


def _fake_transcript(rng) -> str:
    n_words = int(rng.integers(4, 11))
    return " ".join(_VOCAB[int(i)] for i in rng.integers(0, len(_VOCAB), n_words))


def generate_fixture_corpus(n_child: int, n_adult: int, out_dir, seed: int = 0, sample_rate: int = 16000) -> list[dict]:
    """Write a synthetic utterance corpus plus its manifest.jsonl.

    Speakers own several utterances each (pitch is stable per speaker),
    durations are uniform in [2, 10] s, and children/adults occupy
    disjoint fundamental bands. Returns the manifest records.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise IoFailureError(f"cannot create {out_dir}: {exc}") from exc
    rng = np.random.default_rng(seed)
    records = []
    for role, count, f0_range in (("child", n_child, CHILD_F0_RANGE), ("adult", n_adult, ADULT_F0_RANGE)):
        n_speakers = max(1, count // 3)
        speaker_f0 = rng.uniform(*f0_range, n_speakers)
        for i in range(count):
            spk = int(rng.integers(0, n_speakers)) if i >= n_speakers else i
            f0 = float(np.clip(speaker_f0[spk] * rng.uniform(0.97, 1.03), *f0_range))
            duration = float(rng.uniform(2.0, 10.0))
            utt_seed = int(rng.integers(0, 2**63))
            spec = FixtureSpec("synthetic_babble_voice", duration, f0, utt_seed)
            buf = generate_fixture(spec, sample_rate)
            uid = f"{role}_{i:05d}"
            path = os.path.join(out_dir, f"{uid}.wav")
            write_wav(buf, path, "float32")
            records.append(
                {
                    "id": uid,
                    "audio_path": path,
                    "speaker_id": f"{role}_spk_{spk:04d}",
                    "role": role,
                    "source_tag": f"fixture_{role}",
                    "duration_s": len(buf) / sample_rate,
                    "transcript": _fake_transcript(rng),
                }
            )
    manifest = os.path.join(out_dir, "manifest.jsonl")
    with open(manifest, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")
    return records


def generate_noise_pools(out_dir, seed: int = 0, sample_rate: int = 16000,
                         n_babble: int = 12, n_chair: int = 6, n_ambient: int = 2) -> dict:
    """Write babble, chair-transient, and ambient pool WAVs for scenes.

    Returns {"babble": [...], "chair": [...], "ambient": [...]} path lists.
    """
    rng = np.random.default_rng(seed)
    pools = {"babble": [], "chair": [], "ambient": []}
    babble_dir = os.path.join(out_dir, "babble")
    chair_dir = os.path.join(out_dir, "chair")
    ambient_dir = os.path.join(out_dir, "ambient")
    for d in (babble_dir, chair_dir, ambient_dir):
        os.makedirs(d, exist_ok=True)
    for i in range(n_babble):
        f0 = float(rng.uniform(*CHILD_F0_RANGE))
        dur = float(rng.uniform(4.0, 9.0))
        buf = generate_fixture(FixtureSpec("synthetic_babble_voice", dur, f0, int(rng.integers(0, 2**63))), sample_rate)
        path = os.path.join(babble_dir, f"babble_{i:03d}.wav")
        write_wav(buf, path, "float32")
        pools["babble"].append(path)
    for i in range(n_chair):
        # chair scrape/impact stand-in: a short noise burst with a sharp decay
        dur = float(rng.uniform(0.08, 0.30))
        buf = generate_fixture(FixtureSpec("noise_burst", dur, seed=int(rng.integers(0, 2**63))), sample_rate)
        decay = np.exp(-np.arange(len(buf)) / (0.03 * sample_rate))
        buf = AudioBuffer(buf.samples * decay, sample_rate)
        path = os.path.join(chair_dir, f"chair_{i:03d}.wav")
        write_wav(buf, path, "float32")
        pools["chair"].append(path)
    for i in range(n_ambient):
        dur = float(rng.uniform(15.0, 25.0))
        base = generate_fixture(FixtureSpec("noise_burst", dur, seed=int(rng.integers(0, 2**63))), sample_rate)
        # slow amplitude swell so the ambient bed is not statistically flat
        swell = 1.0 + 0.4 * np.sin(2 * np.pi * 0.1 * np.arange(len(base)) / sample_rate + rng.uniform(0, 2 * np.pi))
        buf = AudioBuffer(base.samples * swell * 0.5, sample_rate)
        path = os.path.join(ambient_dir, f"ambient_{i:03d}.wav")
        write_wav(buf, path, "float32")
        pools["ambient"].append(path)
    return pools
