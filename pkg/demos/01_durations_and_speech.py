"""
Durations, speech proportion and usable hours
=============================================

Synthesize a few clips, measure how much of each one is speech, and turn
nominal hours into hours that actually contain speech.
"""

import numpy as np

from speech_audit.audio_metrics import VadConfig, duration_stats, estimate_snr, segment_speech, usable_hours

SR = 16000
rng = np.random.default_rng(0)


def clip(seconds, speech_fraction, hiss=1e-4):
    # hiss with a centred span of 170 ms "syllables" separated by 80 ms dips
    n = int(seconds * SR)
    x = rng.normal(0.0, hiss, n)
    k = int(speech_fraction * n)
    start = (n - k) // 2
    voiced = (np.arange(k) % int(0.25 * SR)) < int(0.17 * SR)
    x[start : start + k] = np.where(voiced, rng.normal(0.0, 0.25, k), x[start : start + k])
    return x


# %%
# A clip that is half speech. The detector marks frames louder than the
# noise floor by a margin, then fills short gaps and drops short islands.
seg = segment_speech(clip(10.0, 0.5), SR)
print(f"speech proportion {seg.speech_proportion:.3f}, threshold {seg.threshold_db:.1f} dBFS")
print("segments", [(round(a, 2), round(b, 2)) for a, b in seg.segments])

# %%
# Over audible background noise the threshold follows the noise floor.
# Raising the margin can only shrink what counts as speech.
noisy = clip(10.0, 0.5, hiss=0.02)
for margin in (12.0, 18.0, 21.0, 24.0):
    s = segment_speech(noisy, SR, VadConfig(relative_margin_db=margin))
    print(f"margin {margin:4.0f} dB: threshold {s.threshold_db:6.1f} dBFS, speech {s.speech_proportion:.3f}")

# %%
# SNR compares power inside and outside the speech segments.
x = clip(6.0, 0.6)
print("SNR dB", round(estimate_snr(x, SR, segment_speech(x, SR)), 1))

# %%
# Duration statistics for a corpus of short prompts.
durations = rng.uniform(1.5, 3.5, 500)
ds = duration_stats(durations)
print(f"median {ds.median_s:.2f} s, p99 {ds.p99_s:.2f} s, under 10 s: {ds.under_10s_fraction:.0%}")

# %%
# Twenty-one nominal hours at 48.3% speech leave about ten hours of speech.
print(f"usable hours: {usable_hours(21, 0.483):.2f}")
