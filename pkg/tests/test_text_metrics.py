import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import CATALAN_PLACES, NAN_TW_ROWS, synthetic_sentences
from speech_audit.errors import EmptyInputError
from speech_audit.text_metrics import (
    TokenMode,
    choose_token_mode,
    detect_dual_script,
    detect_templates,
    edit_similarity,
    normalize,
    prompt_shape_stats,
    strip_cross_script_parens,
    tokenize,
)

PANGRAMS = [
    "The quick brown fox jumps over the lazy dog.",
    "Pack my box with five dozen liquor jugs.",
    "Sphinx of black quartz, judge my vow.",
    "How vexingly quick daft zebras jump!",
    "Jackdaws love my big sphinx of quartz.",
    "Waltz, bad nymph, for quick jigs vex.",
    "Quick zephyrs blow, vexing daft Jim.",
    "Blowzy night-frumps vex'd Jack Q.",
    "Glib jocks quiz nymph to vex dwarf.",
    "Two driven jocks help fax my big quiz.",
    "Five quacking zephyrs jolt my wax bed.",
    "Crazy Fredrick bought many very exquisite opal jewels.",
    "We promptly judged antique ivory buckles for the next prize.",
    "A mad boxer shot a quick, gloved jab to the jaw of his dizzy opponent.",
    "Jaded zombies acted quaintly but kept driving their oxen forward.",
    "Heavy boxes perform quick waltzes and jigs.",
    "Public junk dwarves hug my quartz fox.",
    "Jumpy halfling dwarves pick quartz box.",
    "Fix problem quickly with galvanized jets.",
    "Quizzical twins proved my hijack-bug fix.",
    "Amazingly few discotheques provide jukeboxes.",
    "My faxed joke won a pager in the cable TV quiz show.",
    "Sympathizing would fix Quaker objectives.",
    "Bright vixens jump; dozy fowl quack.",
    "Zelda might fix the job growing quickly on pavement.",
    "Victor jagt zwölf Boxkämpfer quer über den großen Sylter Deich.",
    "Portez ce vieux whisky au juge blond qui fume.",
    "El veloz murciélago hindú comía feliz cardillo y kiwi.",
    "Pchnąć w tę łódź jeża lub ośm skrzyń fig.",
    "Høj bly gom vandt fræk sexquiz på wc.",
]


# --- tokenize ----------------------------------------------------------------


def test_whitespace_tokens():
    assert tokenize("Har eg dekt meg.") == ["har", "eg", "dekt", "meg"]
    assert tokenize("No he anat mai a Agost.") == ["no", "he", "anat", "mai", "a", "agost"]
    assert tokenize("« Hei » , du !") == ["hei", "du"]
    assert tokenize("Hei", lowercase=False) == ["Hei"]


def test_per_character_tokens():
    assert tokenize("竹南鎮", TokenMode.PER_CHARACTER_CJK) == ["竹", "南", "鎮"]
    assert tokenize("我用 iPhone 拍照。", "PerCharacterCJK") == ["我", "用", "iphone", "拍", "照"]
    assert tokenize("ひらがなカナ", TokenMode.PER_CHARACTER_CJK) == list("ひらがなカナ")


def test_normalize():
    assert normalize("  No, he   anat MAI a Agost! ") == "no he anat mai a agost"


def test_edit_similarity():
    assert edit_similarity("", "") == 1.0
    assert edit_similarity("abc", "abc") == 1.0
    assert edit_similarity("kitten", "sitting") == pytest.approx(1 - 3 / 7)
    assert edit_similarity("abc", "") == 0.0


# --- templates ---------------------------------------------------------------


def test_catalan_template_cluster():
    sentences = [f"No he anat mai a {p}." for p in CATALAN_PLACES]
    clusters = detect_templates(sentences)
    assert len(clusters) == 1
    c = clusters[0]
    assert c.key_prefix == ("no", "he", "anat", "mai")
    assert c.size == 30
    assert c.sample_sentences == tuple(sentences[:10])
    assert 0.7 <= c.mean_similarity <= 1.0


def test_unrelated_sentences_form_no_cluster():
    assert len(PANGRAMS) == 30
    assert detect_templates(PANGRAMS) == []


def test_min_cluster_boundary_is_exact():
    sentences = [f"No he anat mai a {p}." for p in CATALAN_PLACES]
    assert detect_templates(sentences[:19], min_cluster=20) == []
    assert len(detect_templates(sentences[:20], min_cluster=20)) == 1


def test_low_similarity_bucket_is_not_a_template():
    tails = synthetic_sentences(25, seed=3)
    sentences = [f"no he anat mai {t}" for t in tails]
    assert detect_templates(sentences) == []
    assert len(detect_templates(sentences, min_similarity=0.0)) == 1


def test_cjk_templates_bucket_by_character():
    sentences = [f"我今天去了{c}市場" for c in "東南西北中上下左右前後內外大小新舊高低長短遠近山水"]
    clusters = detect_templates(sentences)
    assert len(clusters) == 1 and clusters[0].key_prefix == ("我", "今", "天", "去")


def test_sampling_is_seeded():
    sentences = [f"No he anat mai a {p} {i}." for i in range(3) for p in CATALAN_PLACES]
    a = detect_templates(sentences, max_sample=20, seed=5)
    b = detect_templates(sentences, max_sample=20, seed=5)
    assert a == b and a[0].size == 90


def test_templates_need_input():
    with pytest.raises(EmptyInputError):
        detect_templates([])


@given(st.lists(st.sampled_from(["a b c d e", "a b c d f", "x y z w", "a b", "q r s t u v"]), max_size=80))
def test_clusters_partition_the_input(sentences):
    if not sentences:
        return
    clusters = detect_templates(sentences, min_cluster=2, min_similarity=0.0)
    assert sum(c.size for c in clusters) <= len(sentences)
    assert len({c.key_prefix for c in clusters}) == len(clusters)
    sizes = [c.size for c in clusters]
    assert sizes == sorted(sizes, reverse=True)


# --- dual script -------------------------------------------------------------


def test_dual_script_rows():
    v = detect_dual_script("竹南鎮（Tik-lâm-tìn）")
    assert v.dual_script and (v.base_script, v.paren_script) == ("Han", "Latin")
    v = detect_dual_script("竹坑口（Tik-khinn-kháu | Tek-khiⁿ-kháu）")
    assert v.dual_script and (v.base_script, v.paren_script) == ("Han", "Latin")
    assert all(detect_dual_script(r).dual_script for r in NAN_TW_ROWS)


def test_same_script_parenthetical_is_plain():
    assert detect_dual_script("hello (world)").plain
    assert detect_dual_script("竹南鎮").plain
    assert detect_dual_script("(Tik)").plain
    assert detect_dual_script("竹南鎮（）").plain


@given(st.sampled_from(NAN_TW_ROWS + ["hello (world)", "Москва (Moskva)", "abc"]), st.text(" \t", max_size=3))
def test_dual_script_ignores_whitespace_and_paren_width(row, pad):
    ascii_parens = row.replace("（", "(").replace("）", ")")
    assert detect_dual_script(pad + row + pad) == detect_dual_script(row) == detect_dual_script(ascii_parens)


def test_strip_cross_script_parens():
    assert strip_cross_script_parens("竹南鎮（Tik-lâm-tìn）") == "竹南鎮"
    assert strip_cross_script_parens("hello (world)") == "hello (world)"


# --- prompt shape ------------------------------------------------------------


def test_exact_duplicates():
    stats = prompt_shape_stats(["a b", "a b", "c"])
    assert stats.exact_duplicate_fraction == pytest.approx(2 / 3)
    assert stats.median_word_count == 2.0


def test_nan_tw_fixture():
    stats = prompt_shape_stats(NAN_TW_ROWS, "nan-tw")
    assert stats.exact_duplicate_fraction == 0.0
    # the two 竹南鎮 rows collide once their romanizations are removed
    assert stats.script_stripped_duplicate_fraction == pytest.approx(0.2)
    assert stats.dual_script_fraction == 1.0
    assert stats.median_word_count <= 3


def test_short_phrase_fixture():
    phrases = ["hund" if i % 2 else "stor katt" for i in range(100)]
    stats = prompt_shape_stats(phrases)
    assert stats.median_word_count <= 2
    assert stats.exact_duplicate_fraction == 1.0


def test_han_dominant_text_is_counted_per_character():
    zh = ["我今天去了市場", "他在學校讀書"]
    assert choose_token_mode(zh) is TokenMode.PER_CHARACTER_CJK
    stats = prompt_shape_stats(zh, "zh-TW")
    assert stats.token_mode == "PerCharacterCJK"
    assert stats.median_word_count == 6.5
    assert choose_token_mode(["hello world", "竹"]) is TokenMode.WHITESPACE


def test_prompt_stats_need_input():
    with pytest.raises(EmptyInputError):
        prompt_shape_stats([])


@given(st.lists(st.sampled_from(NAN_TW_ROWS + ["a b", "a b c", "我們", "x"]), min_size=1, max_size=30), st.randoms())
def test_prompt_stats_ignore_order(items, rnd):
    shuffled = list(items)
    rnd.shuffle(shuffled)
    a, b = prompt_shape_stats(items), prompt_shape_stats(shuffled)
    assert a == b
    for f in (a.dual_script_fraction, a.exact_duplicate_fraction, a.script_stripped_duplicate_fraction):
        assert 0.0 <= f <= 1.0
