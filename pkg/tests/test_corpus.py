import itertools

import pytest

from sevrank.corpus import (
    Comment,
    DavidsonCounts,
    JtcLabels,
    JTC_WEIGHT_TOTAL,
    JTC_WEIGHTS,
    LabeledExample,
    load_comments,
    load_davidson,
    load_founta,
    load_jtc,
    load_labeled,
    load_pairs,
    load_ruddit,
    load_unintended,
    pairs_to_comments,
    resolve_pairs_to_ids,
    save_labeled,
    transform_davidson,
    transform_founta,
    transform_jtc,
    transform_ruddit,
    transform_unintended,
)

FLAG_NAMES = ("toxic", "severe_toxic", "obscene", "threat", "insult", "identity_hate")


def write(tmp_path, name, content):
    path = tmp_path / name
    path.write_text(content, encoding="utf-8")
    return path


class TestLoadComments:
    def test_rows_become_comments_in_order(self, tmp_path):
        path = write(tmp_path, "c.csv", 'comment_id,text\na,"hi"\nb,"yo"\n')
        assert load_comments(path) == [Comment("a", "hi"), Comment("b", "yo")]

    def test_header_only_gives_empty_list(self, tmp_path):
        path = write(tmp_path, "c.csv", "comment_id,text\n")
        assert load_comments(path) == []

    def test_duplicate_id_names_second_row(self, tmp_path):
        path = write(
            tmp_path, "c.csv",
            "comment_id,text\na,one\nb,two\nc,three\na,four\n",
        )
        with pytest.raises(ValueError, match="row 5"):
            load_comments(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_comments(tmp_path / "absent.csv")

    def test_missing_column(self, tmp_path):
        path = write(tmp_path, "c.csv", "comment_id,body\na,hi\n")
        with pytest.raises(ValueError, match="text"):
            load_comments(path)

    def test_malformed_row_names_row_number(self, tmp_path):
        path = write(tmp_path, "c.csv", "comment_id,text\na,hi\nb\n")
        with pytest.raises(ValueError, match="row 3"):
            load_comments(path)

    def test_embedded_newline_kept_verbatim(self, tmp_path):
        path = write(tmp_path, "c.csv", 'comment_id,text\na,"line one\nline two"\n')
        [comment] = load_comments(path)
        assert comment.text == "line one\nline two"

    def test_empty_text_allowed(self, tmp_path):
        path = write(tmp_path, "c.csv", "comment_id,text\na,\n")
        assert load_comments(path) == [Comment("a", "")]

    def test_loading_is_deterministic(self, tmp_path):
        path = write(tmp_path, "c.csv", "comment_id,text\na,hi\nb,yo\nc,sup\n")
        assert load_comments(path) == load_comments(path)

    def test_crlf_accepted(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_bytes(b"comment_id,text\r\na,hi\r\nb,yo\r\n")
        assert [c.id for c in load_comments(path)] == ["a", "b"]

    def test_extra_columns_allowed(self, tmp_path):
        path = write(tmp_path, "c.csv", "worker,comment_id,text\nw1,a,hi\n")
        assert load_comments(path) == [Comment("a", "hi")]


class TestLoadPairs:
    def test_row_maps_to_pair(self, tmp_path):
        path = write(tmp_path, "p.csv", 'less_toxic,more_toxic\nyou silly,"f*** you"\n')
        [pair] = load_pairs(path)
        assert pair.less_toxic.text == "you silly"
        assert pair.more_toxic.text == "f*** you"

    def test_cardinality(self, tmp_path):
        path = write(tmp_path, "p.csv", "less_toxic,more_toxic\na,b\nc,d\ne,f\n")
        assert len(load_pairs(path)) == 3

    def test_identical_texts_accepted(self, tmp_path):
        path = write(tmp_path, "p.csv", "less_toxic,more_toxic\nsame,same\n")
        [pair] = load_pairs(path)
        assert pair.less_toxic.text == pair.more_toxic.text == "same"
        assert pair.less_toxic.id != pair.more_toxic.id

    def test_synthetic_ids_from_row_numbers(self, tmp_path):
        path = write(tmp_path, "p.csv", "less_toxic,more_toxic\na,b\nc,d\n")
        pairs = load_pairs(path)
        assert pairs[0].less_toxic.id == "p2_l"
        assert pairs[0].more_toxic.id == "p2_m"
        assert pairs[1].less_toxic.id == "p3_l"

    def test_missing_column_names_it(self, tmp_path):
        path = write(tmp_path, "p.csv", "less_toxic,worse\na,b\n")
        with pytest.raises(ValueError, match="more_toxic"):
            load_pairs(path)

    def test_extra_worker_column_allowed(self, tmp_path):
        path = write(tmp_path, "p.csv", "worker,less_toxic,more_toxic\n1,a,b\n")
        assert len(load_pairs(path)) == 1


class TestPairHelpers:
    def test_pairs_to_comments_flattens_in_order(self, tmp_path):
        path = write(tmp_path, "p.csv", "less_toxic,more_toxic\na,b\nc,d\n")
        ids = [c.id for c in pairs_to_comments(load_pairs(path))]
        assert ids == ["p2_l", "p2_m", "p3_l", "p3_m"]

    def test_resolve_by_text_first_occurrence_wins(self, tmp_path):
        path = write(tmp_path, "p.csv", "less_toxic,more_toxic\nhi,yo\n")
        comments = [Comment("c1", "hi"), Comment("c2", "yo"), Comment("c3", "hi")]
        [pair] = resolve_pairs_to_ids(load_pairs(path), comments)
        assert pair.less_toxic.id == "c1"
        assert pair.more_toxic.id == "c2"

    def test_resolve_unmatched_text_errors_with_pair_id(self, tmp_path):
        path = write(tmp_path, "p.csv", "less_toxic,more_toxic\nhi,yo\n")
        with pytest.raises(ValueError, match="p2_m"):
            resolve_pairs_to_ids(load_pairs(path), [Comment("c1", "hi")])


def jtc_oracle(flags):
    """Independent restatement of the flag weighting."""
    weights = {"severe_toxic": 12, "identity_hate": 9, "threat": 8,
               "insult": 6, "obscene": 5, "toxic": 4}
    return sum(weights[k] * v for k, v in flags.items()) / 44.0


class TestTransforms:
    def test_ruddit_endpoints_and_midpoint(self):
        assert transform_ruddit(-1.0) == 0.0
        assert transform_ruddit(1.0) == 1.0
        assert transform_ruddit(0.0) == 0.5

    def test_ruddit_domain_error(self):
        with pytest.raises(ValueError):
            transform_ruddit(1.5)
        with pytest.raises(ValueError):
            transform_ruddit(-1.01)

    def test_jtc_all_zero(self):
        assert transform_jtc(JtcLabels(0, 0, 0, 0, 0, 0)) == 0.0

    def test_jtc_toxic_only(self):
        labels = JtcLabels(toxic=1, severe_toxic=0, obscene=0, threat=0,
                           insult=0, identity_hate=0)
        assert transform_jtc(labels) == pytest.approx(4 / 44)

    def test_jtc_all_flags(self):
        assert transform_jtc(JtcLabels(1, 1, 1, 1, 1, 1)) == 1.0

    def test_jtc_weight_total_is_44(self):
        assert JTC_WEIGHT_TOTAL == 44
        assert sum(JTC_WEIGHTS.values()) == 44

    def test_jtc_exhaustive_against_oracle(self):
        for bits in itertools.product((0, 1), repeat=6):
            flags = dict(zip(FLAG_NAMES, bits))
            assert transform_jtc(JtcLabels(**flags)) == jtc_oracle(flags)

    def test_jtc_invalid_flag_rejected(self):
        with pytest.raises(ValueError):
            JtcLabels(2, 0, 0, 0, 0, 0)

    def test_unintended_zeros_and_ones(self):
        zeros = dict(toxicity=0.0, severe_toxicity=0.0, obscene=0.0,
                     threat=0.0, insult=0.0, identity_attack=0.0)
        assert transform_unintended(**zeros) == 0.0
        ones = {k: 1.0 for k in zeros}
        assert transform_unintended(**ones) == 1.0

    def test_unintended_half_toxicity(self):
        assert transform_unintended(
            toxicity=0.5, severe_toxicity=0.0, obscene=0.0,
            threat=0.0, insult=0.0, identity_attack=0.0,
        ) == pytest.approx(2 / 44)

    def test_unintended_matches_jtc_on_binary_inputs(self):
        for bits in itertools.product((0, 1), repeat=6):
            flags = dict(zip(FLAG_NAMES, bits))
            fractional = dict(
                toxicity=float(flags["toxic"]),
                severe_toxicity=float(flags["severe_toxic"]),
                obscene=float(flags["obscene"]),
                threat=float(flags["threat"]),
                insult=float(flags["insult"]),
                identity_attack=float(flags["identity_hate"]),
            )
            assert transform_unintended(**fractional) == transform_jtc(JtcLabels(**flags))

    def test_unintended_domain_error(self):
        with pytest.raises(ValueError):
            transform_unintended(toxicity=1.2, severe_toxicity=0, obscene=0,
                                 threat=0, insult=0, identity_attack=0)

    def test_davidson_pure_votes(self):
        assert transform_davidson(DavidsonCounts(3, 0, 0)) == 1.0
        assert transform_davidson(DavidsonCounts(0, 0, 3)) == 0.0
        assert transform_davidson(DavidsonCounts(1, 1, 1)) == 0.5

    def test_davidson_requires_a_coder(self):
        with pytest.raises(ValueError):
            DavidsonCounts(0, 0, 0)

    def test_davidson_grid_matches_formula(self):
        for h in range(7):
            for o in range(7):
                for n in range(7):
                    if h + o + n < 1:
                        continue
                    raw = (3 * h + 2 * o + n) / (h + o + n)
                    expected = (raw - 1) / 2
                    got = transform_davidson(DavidsonCounts(h, o, n))
                    assert got == pytest.approx(expected, abs=1e-12)

    def test_founta_levels(self):
        assert transform_founta(0) == 0.0
        assert transform_founta(1) == 0.5
        assert transform_founta(2) == 1.0

    def test_founta_domain_error(self):
        with pytest.raises(ValueError):
            transform_founta(3)
        with pytest.raises(ValueError):
            transform_founta(-1)

    def test_all_transforms_land_in_unit_interval(self):
        import random

        rng = random.Random(11)
        for _ in range(500):
            assert 0.0 <= transform_ruddit(rng.uniform(-1, 1)) <= 1.0
            assert 0.0 <= transform_unintended(
                toxicity=rng.random(), severe_toxicity=rng.random(),
                obscene=rng.random(), threat=rng.random(),
                insult=rng.random(), identity_attack=rng.random(),
            ) <= 1.0
            counts = DavidsonCounts(rng.randint(0, 9), rng.randint(0, 9),
                                    rng.randint(1, 9))
            assert 0.0 <= transform_davidson(counts) <= 1.0

    def test_monotone_in_each_component(self):
        # flipping any flag 0 -> 1 never lowers the score (checked over all
        # 64 combinations), and the continuous transforms are nondecreasing
        # along grid steps
        for bits in itertools.product((0, 1), repeat=6):
            flags = dict(zip(FLAG_NAMES, bits))
            base = transform_jtc(JtcLabels(**flags))
            for name in FLAG_NAMES:
                if flags[name] == 0:
                    raised = dict(flags, **{name: 1})
                    assert transform_jtc(JtcLabels(**raised)) >= base
        grid = [i / 10 for i in range(11)]
        assert all(
            transform_ruddit(2 * b - 1) >= transform_ruddit(2 * a - 1)
            for a, b in zip(grid, grid[1:])
        )
        # adding a hate vote never lowers the average, and upgrading one
        # coder's vote (neither -> offensive -> hate) never lowers it;
        # adding an offensive vote is not monotone because it also grows
        # the denominator
        for h in range(4):
            for o in range(4):
                for n in range(4):
                    if h + o + n < 1:
                        continue
                    base = transform_davidson(DavidsonCounts(h, o, n))
                    assert transform_davidson(DavidsonCounts(h + 1, o, n)) >= base
                    if n > 0:
                        assert transform_davidson(DavidsonCounts(h, o + 1, n - 1)) >= base
                    if o > 0:
                        assert transform_davidson(DavidsonCounts(h + 1, o - 1, n)) >= base


class TestLabeledRoundTrip:
    def test_save_and_load(self, tmp_path):
        examples = [
            LabeledExample(Comment("a", "hi there"), 0.25, "toy"),
            LabeledExample(Comment("b", 'quoted, "text"'), 1.0, "toy"),
        ]
        path = tmp_path / "labeled.csv"
        save_labeled(path, examples)
        loaded = load_labeled(path, source="toy")
        assert [ex.comment for ex in loaded] == [ex.comment for ex in examples]
        assert [ex.score for ex in loaded] == [0.25, 1.0]

    def test_score_written_with_six_decimals(self, tmp_path):
        path = tmp_path / "labeled.csv"
        save_labeled(path, [LabeledExample(Comment("a", "x"), 1 / 3, "toy")])
        assert path.read_text().splitlines()[1] == "a,x,0.333333"

    def test_out_of_range_score_rejected(self):
        with pytest.raises(ValueError):
            LabeledExample(Comment("a", "x"), 1.5, "toy")


class TestKindLoaders:
    def test_ruddit_loader(self, tmp_path):
        path = write(tmp_path, "r.csv",
                     "comment_id,text,score\nr1,mild,-1.0\nr2,harsh,1.0\nr3,mid,0.0\n")
        examples = load_ruddit(path)
        assert [ex.score for ex in examples] == [0.0, 1.0, 0.5]
        assert examples[0].source == "ruddit"

    def test_jtc_loader_published_layout(self, tmp_path):
        header = "id,comment_text,toxic,severe_toxic,obscene,threat,insult,identity_hate"
        path = write(tmp_path, "j.csv", f"{header}\nx1,some text,1,0,0,0,0,0\n")
        [ex] = load_jtc(path)
        assert ex.score == pytest.approx(4 / 44)
        assert ex.comment == Comment("x1", "some text")

    def test_unintended_loader_uses_target_column(self, tmp_path):
        header = ("id,target,comment_text,severe_toxicity,obscene,"
                  "identity_attack,insult,threat,sexually_explicit")
        path = write(tmp_path, "u.csv", f"{header}\nu1,0.5,words,0,0,0,0,0,0.9\n")
        [ex] = load_unintended(path)
        assert ex.score == pytest.approx(2 / 44)

    def test_davidson_loader_published_layout(self, tmp_path):
        header = "count,hate_speech,offensive_language,neither,class,tweet"
        path = write(tmp_path, "d.csv", f"{header}\n3,0,0,3,2,some tweet\n")
        [ex] = load_davidson(path)
        assert ex.score == 0.0
        assert ex.comment.text == "some tweet"

    def test_founta_loader(self, tmp_path):
        path = write(tmp_path, "f.csv", "comment_id,text,label\nf1,words,2\n")
        [ex] = load_founta(path)
        assert ex.score == 1.0

    def test_founta_bad_label_names_row(self, tmp_path):
        path = write(tmp_path, "f.csv", "comment_id,text,label\nf1,words,9\n")
        with pytest.raises(ValueError):
            load_founta(path)
