import numpy as np
import pytest

from defectkit.errors import DegenerateDataError
from defectkit.fft import (FFTree, Range, build_tree, fit, median_split, predict,
                           score_ranges, tree_from_dict, tree_from_text)
from defectkit.metrics import goal

from conftest import make_dataset, planted_dataset

D2H = goal("dist2heaven")


def interpret_rules(text, names, row):
    """Walk the serialized rule list literally, line by line."""
    classes = {"true": 1, "false": 0}
    for line in text.strip().splitlines():
        line = line.strip()
        if line.startswith("else if "):
            body = line[len("else if "):]
        elif line.startswith("if "):
            body = line[len("if "):]
        else:
            return classes[line.split()[-1]]
        name, relation, value, _, klass = body.split()
        x = row[names.index(name)]
        hit = x <= float(value) if relation == "<=" else x > float(value)
        if hit:
            return classes[klass]
    raise AssertionError("rule list had no final else")


def fig_tree():
    """A five-line tree over named attributes (exits false, true, true, true)."""
    names = ("cbo", "rfc", "dam", "amc")
    levels = (
        (Range(0, "<=", 4.0, 0, 0.0), 0),
        (Range(1, ">", 32.0, 1, 0.0), 1),
        (Range(2, ">", 0.0, 1, 0.0), 1),
        (Range(3, "<=", 32.25, 1, 0.0), 1),
    )
    return FFTree(levels, (1, 0), structure_id=0b1110, feature_names=names)


class TestMedianSplit:
    def test_odd_count(self):
        assert median_split(make_dataset([[1.0], [2.0], [3.0]], [0, 0, 1]), 0) == 2.0

    def test_even_count_lower_median(self):
        data = make_dataset([[1.0], [2.0], [3.0], [4.0]], [0, 0, 1, 1])
        assert median_split(data, 0) == 2.0

    def test_constant_column(self):
        assert median_split(make_dataset([[7.0], [7.0], [7.0]], [0, 1, 0]), 0) == 7.0

    def test_empty(self):
        data = make_dataset([[1.0]], [0]).subset([])
        with pytest.raises(ValueError):
            median_split(data, 0)

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            values = rng.integers(0, 50, int(rng.integers(1, 15))).astype(float)
            data = make_dataset(values.reshape(-1, 1), np.zeros(len(values), dtype=int))
            assert median_split(data, 0) == sorted(values)[(len(values) - 1) // 2]


class TestScoreRanges:
    def test_perfect_separator_attains_optimum(self, separator6):
        best = score_ranges(separator6, D2H)[0]
        assert best.score == 0.0
        assert best.attribute == 0

    def test_random_attribute_scores_worse_than_planted(self):
        rng = np.random.default_rng(2)
        labels = np.array([0, 1] * 10)
        planted = labels * 10 + rng.random(20)
        noise = rng.random(20)
        data = make_dataset(np.column_stack([planted, noise]), labels)
        ranked = score_ranges(data, D2H)
        assert ranked[0].attribute == 0
        planted_best = min(r.score for r in ranked if r.attribute == 0)
        noise_best = min(r.score for r in ranked if r.attribute == 1)
        assert planted_best < noise_best
        # the noise attribute hovers near the no-information diagonal
        assert noise_best > 0.25

    def test_constant_attribute_never_ranks_first(self, separator6):
        data = make_dataset(
            np.column_stack([separator6.features[:, 0], np.full(6, 3.0)]),
            separator6.labels)
        assert score_ranges(data, D2H)[0].attribute == 0

    def test_single_class_rejected(self):
        data = make_dataset([[1.0], [2.0]], [1, 1])
        with pytest.raises(DegenerateDataError):
            score_ranges(data, D2H)

    def test_sorted_best_first(self, separator6):
        ranked = score_ranges(separator6, D2H)
        scores = [r.score for r in ranked]
        assert scores == sorted(scores)
        assert len(ranked) == 4 * len(separator6.schema.feature_names)


class TestBuildTree:
    def test_depth_one_separator(self, separator6):
        tree = build_tree(separator6, D2H, structure_id=0b1, depth=1)
        assert tree.depth == 1
        rng0, exit_class = tree.levels[0]
        assert exit_class == 1
        assert (rng0.attribute, rng0.relation, rng0.threshold) == (0, ">", 3.0)
        assert tree.final_leaf == (1, 0)
        assert tree.predict(separator6.features).tolist() == separator6.labels.tolist()

    def test_structure_bits_dictate_exits(self):
        data = planted_dataset(n=80, n_noise=3, seed=5)
        tree = build_tree(data, D2H, structure_id=0b1110, depth=4)
        assert [exit_class for _, exit_class in tree.levels] == [0, 1, 1, 1]

    def test_depth_zero_majority_leaf(self, separator6):
        tree = build_tree(separator6, D2H, structure_id=0, depth=0)
        assert tree.depth == 0
        assert tree.final_leaf[0] == tree.final_leaf[1]
        assert predict(tree, separator6.instances[0]) == tree.final_leaf[1]

    def test_truncates_when_remaining_single_class(self, separator6):
        # the separating first level leaves only clean instances behind
        tree = build_tree(separator6, D2H, structure_id=0b111, depth=3)
        assert tree.depth < 3
        assert tree.structure_id == 0b111
        assert tree.final_leaf == (0, 0)

    def test_structure_id_out_of_range(self, separator6):
        with pytest.raises(ValueError):
            build_tree(separator6, D2H, structure_id=4, depth=2)


class TestFit:
    @pytest.mark.parametrize("depth,expected", [(1, 2), (2, 4), (3, 8), (4, 16), (5, 32)])
    def test_enumerates_all_trees(self, depth, expected):
        data = planted_dataset(n=60, n_noise=2, seed=9)
        ensemble = fit(data, D2H, depth)
        assert len(ensemble.trees) == expected
        assert len(ensemble.scores) == expected

    def test_best_is_argbest(self):
        data = planted_dataset(n=60, n_noise=2, seed=9)
        ensemble = fit(data, D2H, 3)
        for score in ensemble.scores:
            assert not D2H.better(score, ensemble.scores[ensemble.best])

    def test_planted_separator_reaches_zero(self, separator6):
        ensemble = fit(separator6, D2H, 2)
        assert ensemble.scores[ensemble.best] == 0.0

    def test_fit_is_order_independent(self):
        data = planted_dataset(n=50, n_noise=3, seed=1)
        shuffled = data.subset(np.random.default_rng(0).permutation(len(data)))
        a = fit(data, D2H, 3)
        b = fit(shuffled, D2H, 3)
        assert a.scores[a.best] == pytest.approx(b.scores[b.best], abs=1e-12)

    def test_depth_zero_rejected(self, separator6):
        with pytest.raises(ValueError):
            fit(separator6, D2H, 0)

    def test_p_opt_goal_supported(self):
        data = planted_dataset(n=40, n_noise=2, seed=3)
        ensemble = fit(data, goal("p_opt"), 2)
        assert 0.0 <= ensemble.scores[ensemble.best] <= 1.0


class TestPredictRouting:
    def test_first_level_match_exits_clean(self):
        assert predict(fig_tree(), np.array([3.0, 40.0, 1.0, 10.0])) == 0

    def test_second_level_match_exits_defective(self):
        assert predict(fig_tree(), np.array([5.0, 33.0, 0.0, 50.0])) == 1

    def test_no_level_matches_falls_to_final_false(self):
        assert predict(fig_tree(), np.array([5.0, 30.0, 0.0, 40.0])) == 0

    def test_schema_mismatch(self):
        with pytest.raises(ValueError):
            predict(fig_tree(), np.array([1.0, 2.0]))

    def test_every_instance_gets_exactly_one_exit(self):
        data = planted_dataset(n=30, n_noise=2, seed=8)
        tree = build_tree(data, D2H, 0b101, 3)
        for x in data.features:
            exits = [exit_class for rng, exit_class in tree.levels if rng.matches(
                x.reshape(1, -1))[0]]
            routed = exits[0] if exits else tree.final_leaf[1]
            assert predict(tree, x) == routed


class TestSerialization:
    def test_text_format_matches_rule_list(self):
        text = fig_tree().to_text()
        assert text.splitlines() == [
            "if cbo <= 4 then false",
            "else if rfc > 32 then true",
            "else if dam > 0 then true",
            "else if amc <= 32.25 then true",
            "else false",
        ]

    def test_text_round_trip(self):
        tree = fig_tree()
        again = tree_from_text(tree.to_text(), tree.feature_names)
        assert again.final_leaf == tree.final_leaf
        assert again.structure_id == tree.structure_id
        for (r1, e1), (r2, e2) in zip(tree.levels, again.levels):
            assert (r1.attribute, r1.relation, r1.threshold, e1) == \
                   (r2.attribute, r2.relation, r2.threshold, e2)

    def test_majority_leaf_round_trips_as_bare_else(self):
        data = make_dataset([[1.0], [2.0]], [1, 1], loc=[5, 5])
        tree = build_tree(data, D2H, 0, 0)
        assert tree.to_text() == "else true"
        again = tree_from_text(tree.to_text(), tree.feature_names)
        assert again.final_leaf == tree.final_leaf
        assert again.depth == 0

    def test_dict_round_trip_exact(self):
        data = planted_dataset(n=40, n_noise=2, seed=4)
        tree = build_tree(data, D2H, 0b10, 2)
        assert tree_from_dict(tree.to_dict()) == tree

    def test_interpreter_agrees_with_predict(self):
        rng = np.random.default_rng(17)
        for depth in (1, 2, 3):
            for trial in range(5):
                data = make_dataset(rng.integers(0, 8, (20, 3)).astype(float),
                                    rng.integers(0, 2, 20))
                if len(np.unique(data.labels)) < 2:
                    continue
                for structure_id in range(2 ** depth):
                    tree = build_tree(data, D2H, structure_id, depth)
                    text = tree.to_text()
                    names = list(tree.feature_names)
                    for row in data.features:
                        assert tree.predict_one(row) == interpret_rules(text, names, row)
