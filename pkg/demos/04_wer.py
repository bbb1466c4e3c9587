"""
Word error rate
===============

Align a reference with a hypothesis and break the errors down.
"""

from speech_audit.text_metrics import TokenMode
from speech_audit.wer import align_text, corpus_wer, top_substitutions

# %%
# Two orthographies of the same sentence: half the words are substituted.
r = align_text("har eg dekt meg med song og harpespel", "har jeg dekket meg med sang og harpespill")
print(r.summary_line())
for ref, hyp, n in top_substitutions(r):
    print(f"  {ref} -> {hyp} x{n}")

# %%
# Character error rate for text without word boundaries.
print(align_text("竹南鎮", "竹東鎮", mode=TokenMode.PER_CHARACTER_CJK).summary_line().replace("WER", "CER"))

# %%
# Corpus WER pools the counts; it is not the mean of per-pair rates.
pairs = [("a b c d e f g h i j".split(), "a x c e f g h z j q".split()), ("a b".split(), "a b".split())]
print(corpus_wer(pairs).summary_line())
