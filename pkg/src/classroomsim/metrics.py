"""Objective evaluation: SI-SDR and word-level error decomposition.

Word alignment uses minimum edit distance with a deterministic
backtrace; among minimum-distance alignments the one with the most
exact matches is chosen, which keeps the substitution count stable
under swapping reference and hypothesis.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioBuffer
from .errors import AllEmptyReferencesError, LengthMismatchError, ZeroReferenceError

MATCH, SUB, DEL, INS = "match", "sub", "del", "ins"


def si_sdr(estimate: AudioBuffer, reference: AudioBuffer, zero_mean: bool = False) -> float:
    """Scale-invariant signal-to-distortion ratio in dB.

    Projects the estimate onto the reference and compares projection
    energy against residual energy. Returns math.inf when the residual
    is zero (estimate is a scaled copy of the reference) and -math.inf
    when the signals are orthogonal.
    """
    if len(estimate) != len(reference):
        raise LengthMismatchError(f"signal lengths differ: {len(estimate)} vs {len(reference)}")
    if len(reference) == 0:
        raise LengthMismatchError("signals are empty")
    est = estimate.samples
    ref = reference.samples
    if zero_mean:
        est = est - est.mean()
        ref = ref - ref.mean()
    ref_energy = float(np.dot(ref, ref))
    if ref_energy == 0.0:
        raise ZeroReferenceError("reference signal is all zeros")
    coeff = float(np.dot(est, ref)) / ref_energy
    if coeff == 0.0:
        return -math.inf
    target = coeff * ref
    residual = est - target
    res_energy = float(np.dot(residual, residual))
    if res_energy == 0.0:
        return math.inf
    return 10.0 * math.log10(float(np.dot(target, target)) / res_energy)


@dataclass
class AlignmentReport:
    """Token alignment with its edit-operation counts."""

    n_ref: int
    matches: int
    substitutions: int
    insertions: int
    deletions: int
    pairs: list = field(repr=False, default_factory=list)

    @property
    def n_hyp(self) -> int:
        return self.matches + self.substitutions + self.insertions

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def wer(self) -> float:
        """(S + D + I) / n_ref; NaN when the reference is empty."""
        if self.n_ref == 0:
            return math.nan
        return self.errors / self.n_ref

    def to_dict(self) -> dict:
        return {
            "n_ref": self.n_ref,
            "matches": self.matches,
            "substitutions": self.substitutions,
            "insertions": self.insertions,
            "deletions": self.deletions,
            "wer": None if self.n_ref == 0 else self.wer,
        }


def align_words(ref_tokens, hyp_tokens) -> AlignmentReport:
    """Minimum-edit-distance alignment of two token lists.

    Unit costs; among minimum-distance alignments the match count is
    maximized, and the backtrace breaks remaining ties preferring
    match > substitution > deletion > insertion.
    """
    ref = list(ref_tokens)
    hyp = list(hyp_tokens)
    n, m = len(ref), len(hyp)
    # cost[i][j] = (edit distance, -max matches) for ref[:i] vs hyp[:j]
    inf = (n + m + 1, 0)
    cost = [[inf] * (m + 1) for _ in range(n + 1)]
    cost[0][0] = (0, 0)
    for i in range(1, n + 1):
        cost[i][0] = (i, 0)
    for j in range(1, m + 1):
        cost[0][j] = (j, 0)
    for i in range(1, n + 1):
        row = cost[i]
        prev = cost[i - 1]
        r = ref[i - 1]
        for j in range(1, m + 1):
            d_diag, k_diag = prev[j - 1]
            if r == hyp[j - 1]:
                best = (d_diag, k_diag - 1)
            else:
                best = (d_diag + 1, k_diag)
            d_up, k_up = prev[j]
            if (d_up + 1, k_up) < best:
                best = (d_up + 1, k_up)
            d_left, k_left = row[j - 1]
            if (d_left + 1, k_left) < best:
                best = (d_left + 1, k_left)
            row[j] = best
    pairs = []
    i, j = n, m
    while i > 0 or j > 0:
        here = cost[i][j]
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and cost[i - 1][j - 1] == (here[0], here[1] + 1):
            pairs.append((ref[i - 1], hyp[j - 1], MATCH))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and cost[i - 1][j - 1] == (here[0] - 1, here[1]):
            pairs.append((ref[i - 1], hyp[j - 1], SUB))
            i, j = i - 1, j - 1
        elif i > 0 and cost[i - 1][j] == (here[0] - 1, here[1]):
            pairs.append((ref[i - 1], None, DEL))
            i = i - 1
        else:
            pairs.append((None, hyp[j - 1], INS))
            j = j - 1
    pairs.reverse()
    ops = [p[2] for p in pairs]
    return AlignmentReport(
        n_ref=n,
        matches=ops.count(MATCH),
        substitutions=ops.count(SUB),
        insertions=ops.count(INS),
        deletions=ops.count(DEL),
        pairs=pairs,
    )


def normalize_tokens(text: str) -> list[str]:
    """Lowercase, strip punctuation except intra-word apostrophes, split."""
    cleaned = []
    for ch in text.lower():
        if ch.isalnum() or ch == "'":
            cleaned.append(ch)
        else:
            cleaned.append(" ")
    tokens = "".join(cleaned).split()
    return [t for t in (tok.strip("'") for tok in tokens) if t]


def corpus_wer(pairs) -> tuple[dict, list[AlignmentReport]]:
    """Token-weighted corpus WER over (reference text, hypothesis text) pairs.

    Pools error counts over files rather than averaging per-file rates.
    Returns the aggregate summary dict and the per-file reports.
    """
    reports = []
    for ref_text, hyp_text in pairs:
        reports.append(align_words(normalize_tokens(ref_text), normalize_tokens(hyp_text)))
    total_ref = sum(r.n_ref for r in reports)
    if total_ref == 0:
        raise AllEmptyReferencesError("every reference is empty; WER is undefined")
    summary = {
        "aggregate_wer": sum(r.errors for r in reports) / total_ref,
        "substitutions": sum(r.substitutions for r in reports),
        "insertions": sum(r.insertions for r in reports),
        "deletions": sum(r.deletions for r in reports),
        "n_ref": total_ref,
        "n_files": len(reports),
    }
    return summary, reports
