"""
Prompt text checks
==================

Find template-generated prompts, dual-script prompts and script mismatches.
"""

from speech_audit.text_metrics import detect_dual_script, detect_templates, prompt_shape_stats
from speech_audit.variety import check_script_expectation, detect_script

# %%
# Thirty prompts that differ only in a trailing place name collapse into one cluster.
places = [f"Place{i}" for i in range(30)]
prompts = [f"No he anat mai a {p}." for p in places] + ["El gat dorm al sol.", "Plou molt avui."]
for c in detect_templates(prompts):
    print(f"template {' '.join(c.key_prefix)!r} x{c.size}, similarity {c.mean_similarity:.2f}")

# %%
# A Han place name followed by a parenthesised romanization is a dual-script prompt.
rows = ["竹南鎮（Tik-lâm-tìn）", "竹東鎮（Tik-tang-tìn）", "竹南鎮（Tek-lâm-tìn）"]
print(detect_dual_script(rows[0]))
stats = prompt_shape_stats(rows)
print(f"dual-script {stats.dual_script_fraction:.2f}, duplicates once stripped {stats.script_stripped_duplicate_fraction:.2f}")

# %%
# Script profile of a single prompt, and conformance of a corpus to an expected script.
p = detect_script(rows[0])
print(p.verdict.value, dict(p.per_script_letter_counts))
conf = check_script_expectation(["Добар дан", "Dobar dan", "Хвала"], "Cyrillic")
print(f"Cyrillic conformance {conf.fraction:.2f}")
