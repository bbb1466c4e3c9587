"""
Marker-based variety classification
===================================

Classify Norwegian sentences as Nynorsk or Bokmål, tally a corpus, and run the
same machinery on a custom lexicon.
"""

from speech_audit.report import tally_markdown
from speech_audit.variety import MarkerLexicon, builtin_lexicon, classify_corpus, classify_two_way, norwegian_lexicon

no = norwegian_lexicon()

# %%
# Each sentence is scored by the distinct markers it contains plus a per-word
# suffix bonus. The higher score wins; a tie with any evidence is Mixed.
for sentence in [
    "Har eg dekt meg med song og harpespel.",
    "Har jeg dekket meg med sang og harpespill.",
    "Eg veit ikke.",
    "Det er fint her.",
]:
    v = classify_two_way(sentence, no)
    print(f"{v.category.value:9} A={v.a_score} B={v.b_score} {sentence}")

# %%
# A corpus tally with percentages rounded half-up to one decimal.
corpus = ["Eg veit ikkje."] * 7 + ["Jeg vet ikke."] * 2 + ["Det er fint."]
print(tally_markdown(classify_corpus(corpus, no), title="Norwegian toy corpus"))

# %%
# The Cantonese lexicon matches substrings, since Chinese text has no spaces.
yue = builtin_lexicon("yue")
print(tally_markdown(classify_corpus(["我哋去咗街市", "我们去了市场", "今天"], yue), title="Cantonese toy corpus"))

# %%
# Any two-way lexicon plugs into the same classifier.
custom = MarkerLexicon("colour", frozenset({"colour", "favour"}), frozenset({"color", "favor"}))
print(classify_two_way("My favourite colour is blue.", custom).category.value)
