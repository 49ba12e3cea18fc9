import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hwfeedback.docmodel import Page, read_canonical
from hwfeedback.errors import ParseError
from hwfeedback.feedback import (
    BELOW_WORD,
    MARGIN,
    OVERLAY_MARKER,
    ErrorKind,
    FeedbackConfig,
    Lexicon,
    char_highlights,
    check_spelling,
    detect_segmentation_errors,
    feedback_report,
    find_errors,
    generate_feedback,
    load_lexicon,
    measure_interline_gaps,
    plan_annotations,
    plan_violations,
    render_svg,
    split_token,
)
from hwfeedback.recog_eval import levenshtein

from helpers import FIXTURES, box_word, grid_page, shapely_problems

VOCAB = ["the", "quick", "brown", "fox", "jumps", "over", "lazy", "dog", "today", "teh", "qiuck", "dgo", "xqzt", "weekend", "thelazy"]


def test_lexicon_loading():
    assert len(load_lexicon("donut\nthe\nlazy")) == 3
    assert load_lexicon("the\t5021").freq("the") == 5021
    lex = load_lexicon("the\t3\nThe\t9\nthe\t1")
    assert len(lex) == 1 and lex.freq("the") == 9
    warnings = []
    load_lexicon("a\tmany\nb\t2", warnings)
    assert len(warnings) == 1
    with pytest.raises(ParseError):
        load_lexicon("\n\n")


def test_spelling_examples():
    lex = Lexicon.from_words(["lazy", "donut", "the"])
    assert check_spelling("lazy", lex) is None
    flag = check_spelling("dounut", lex)
    assert flag.suggestion == "donut" and flag.kind is ErrorKind.SPELLING
    unknown = check_spelling("xqzt", lex)
    assert unknown.unknown and unknown.label == "?"


def test_spelling_ignores_punctuation_case_and_digits():
    lex = Lexicon.from_words(["lazy"])
    assert check_spelling('"Lazy,"', lex) is None
    assert check_spelling("2nd", lex) is None
    assert split_token("(dog).") == ("(", "dog", ").")


def test_spelling_tie_goes_to_frequency_then_alphabet():
    lex = Lexicon.from_words(["cat", "cot", "cut"], {"cot": 5})
    assert check_spelling("cxt", lex).suggestion == "cot"
    assert check_spelling("cxt", Lexicon.from_words(["cut", "cat"])).suggestion == "cat"


def test_segmentation_examples():
    tokens = lambda *ts: [(f"w{i}", t) for i, t in enumerate(ts)]  # noqa: E731
    flags = detect_segmentation_errors(tokens("thelazy"), Lexicon.from_words(["the", "lazy"]))
    assert [(f.kind, f.suggestion) for f in flags] == [(ErrorKind.MERGED_WORDS, "the lazy")]
    assert detect_segmentation_errors(tokens("week", "end"), Lexicon.from_words(["weekend", "week", "end"])) == []
    flags = detect_segmentation_errors(tokens("week", "ennd"), Lexicon.from_words(["weekend", "week"]))
    assert [(f.kind, f.suggestion, f.word_ids) for f in flags] == [(ErrorKind.SPLIT_COMPOUND, "weekend", ("w0", "w1"))]


def test_find_errors_does_not_double_flag():
    lex = Lexicon.from_words(["weekend", "week", "the", "lazy", "dog"])
    flags = find_errors([("a", "the"), ("b", "week"), ("c", "ennd"), ("d", "thelazy"), ("e", "dgo")], lex)
    assert [f.kind for f in flags] == [ErrorKind.SPLIT_COMPOUND, ErrorKind.MERGED_WORDS, ErrorKind.SPELLING]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["the", "lazy", "dog", "fox", "over"]), max_size=8))
def test_no_segmentation_flags_on_valid_tokens(words):
    lex = Lexicon.from_words(["the", "lazy", "dog", "fox", "over"])
    assert detect_segmentation_errors([(str(i), w) for i, w in enumerate(words)], lex) == []


@settings(max_examples=200, deadline=None)
@given(st.text("abcde", min_size=1, max_size=7))
def test_spelling_suggestions_within_budget(token):
    lex = Lexicon.from_words(["abc", "bead", "cab", "dace", "ebb", "a", "deed"])
    flag = check_spelling(token, lex)
    if token in lex:
        assert flag is None
    elif flag is not None and flag.suggestion is not None:
        assert levenshtein(token, flag.suggestion).distance <= 2


def test_highlight_examples():
    assert char_highlights("donut", "donut") == ()
    assert char_highlights("dounut", "donut") == (2,)
    assert char_highlights("ab", "ba") == (0, 1)


@settings(max_examples=300, deadline=None)
@given(st.text("abc", max_size=6), st.text("abc", max_size=6))
def test_highlight_size_bound(a, b):
    marks = char_highlights(a, b)
    stats = levenshtein(a, b)
    assert len(marks) <= stats.distance + stats.insertions
    if a:
        assert (marks == ()) == (a == b)


def test_interline_gaps():
    line = lambda y0, y1: [box_word("a", 0, y0, 10, y1)]  # noqa: E731
    assert measure_interline_gaps([line(0, 20), line(40, 60)]) == [20]
    assert measure_interline_gaps([line(0, 30), line(25, 55)]) == [-5]
    assert measure_interline_gaps([line(0, 20)]) == []


def _spaced_page():
    words = [box_word("w0", 20, 50, 120, 90, "teh", 0), box_word("w1", 400, 50, 500, 90, "fox", 1),
             box_word("w2", 20, 200, 120, 240, "lazy", 2), box_word("w3", 400, 200, 500, 240, "dgo", 3)]
    return Page("spaced", 800, 400, tuple(words))


def test_generous_spacing_places_below_words(lexicon):
    result = generate_feedback(_spaced_page(), lexicon)
    assert [p.strategy for p in result.plan.placements] == [BELOW_WORD, BELOW_WORD]
    page = _spaced_page()
    for p in result.plan.placements:
        word = page.word(p.word_ids[0])
        assert p.rect.y_min >= word.box.y_max
        assert 0 <= p.rect.x_min and p.rect.x_max <= page.width and p.rect.y_max <= page.height


def test_tight_lines_avoid_below_word(lexicon):
    page = read_canonical(FIXTURES / "tight_lines.jsonl").pages[0]
    result = generate_feedback(page, lexicon)
    assert result.flags
    assert {p.strategy for p in result.plan.placements} <= {MARGIN, OVERLAY_MARKER}
    assert not plan_violations(page, result.plan)
    assert not shapely_problems(page, result.plan)


def test_colliding_neighbours_are_shifted_or_escalated():
    lex = Lexicon.from_words(["absolutely", "basically"])
    page = Page("c", 600, 300, (box_word("a", 20, 50, 60, 80, "absolutly", 0), box_word("b", 65, 50, 105, 80, "basicaly", 1)))
    result = generate_feedback(page, lex)
    first, second = result.plan.placements
    assert first.strategy == BELOW_WORD
    assert second.strategy != BELOW_WORD or second.rect.x_min >= first.rect.x_max
    assert not plan_violations(page, result.plan)
    assert not shapely_problems(page, result.plan)


def test_plans_on_random_pages_are_safe(lexicon):
    rng = random.Random(21)
    for k in range(100):
        gap = rng.choice([rng.uniform(0, 0.5), rng.uniform(0.5, 2.5)]) * 40
        page = grid_page(rng, f"r{k}", line_gap=gap, vocabulary=VOCAB)
        result = generate_feedback(page, lexicon)
        assert len(result.plan.placements) == len(result.flags)
        assert not plan_violations(page, result.plan)
        assert not shapely_problems(page, result.plan)


def test_render_zero_flags_has_no_annotation_layer(lexicon):
    page = Page("ok", 400, 200, (box_word("a", 10, 10, 60, 40, "the", 0),))
    result = generate_feedback(page, lexicon)
    assert result.flags == ()
    assert 'id="annotations"' not in render_svg(page, result.flags, result.plan)


def test_render_single_below_word_flag(lexicon):
    page = Page("one", 400, 200, (box_word("a", 10, 10, 60, 40, "teh", 0),))
    result = generate_feedback(page, lexicon)
    svg = render_svg(page, result.flags, result.plan)
    assert svg.count("<text ") == 1 and "below_word" in svg
    (p,) = result.plan.placements
    assert p.rect.y_min >= 40 and p.rect.y_max <= 200


def test_feedback_is_deterministic(lexicon):
    page = read_canonical(FIXTURES / "tight_lines.jsonl").pages[0]
    a, b = generate_feedback(page, lexicon), generate_feedback(page, lexicon)
    assert render_svg(page, a.flags, a.plan) == render_svg(page, b.flags, b.plan)
    assert feedback_report(page, a) == feedback_report(page, b)


def test_min_gap_ratio_controls_strategy(lexicon):
    page = _spaced_page()
    strict = generate_feedback(page, lexicon, FeedbackConfig(min_gap_ratio=100.0))
    assert BELOW_WORD not in {p.strategy for p in strict.plan.placements}


def test_plan_for_page_without_flags():
    page = Page("e", 10, 10, ())
    assert plan_annotations(page, []).placements == ()
