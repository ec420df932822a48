import pytest

from app.services.dstream import enumerate_d
from app.services.oracle import box_search, delta_scan
from app.services.search_service import (
    SearchService,
    basic_search,
    cube_families,
    delta_of,
    fast_search,
    full_search,
    merge_solutions,
    mordell_constant,
    mordell_point,
    plan_all_shards,
    reconstruct_xy,
    run_shard,
    search_divisor_class,
    solution_mordell_point,
    thue_scan,
    verify_solution,
)
from app.utils.errors import CurveMismatch, ImpossibleK, ParityError
from constants.search_constants import K33_SOLUTION, SolutionPath
from models.search_models import DStats, Solution
from utils.modarith import is_perfect_square


def _triples(solutions):
    return {s.triple for s in solutions}


def _fast_hits(config):
    stats = DStats()
    hits = []
    for divclass in enumerate_d(config):
        search_divisor_class(divclass, config, stats, hits)
    return hits, stats


class TestIdentities:

    def test_delta_worked_candidate(self):
        assert delta_of(-11, 2, 21, 1) == 32400
        assert is_perfect_square(32400) == 180

    def test_delta_factored_form(self):
        # Δ = 12d(|z|³ − c)，c = εδk + d³/4
        for k, epsilon in ((21, 1), (33, -1)):
            for d in (1, 2, 4, 5, 7, 8, 10):
                delta = 1 if d % 3 == 1 else -1
                sign = epsilon * delta
                for abs_z in range(1, 30):
                    assert 4 * delta_of(sign * abs_z, d, k, epsilon) == \
                        48 * d * abs_z ** 3 - 12 * d * (4 * epsilon * delta * k + d ** 3)

    def test_degenerate_delta(self):
        assert delta_of(2, 1, 8, 1) == -3
        assert delta_of(2, 2, 8, 1) == -3 * 2 ** 4

    def test_reconstruct_worked_candidate(self):
        assert reconstruct_xy(-11, 2, 21, 30) == (16, -14)

    def test_reconstruct_k33(self):
        s = K33_SOLUTION
        n = 33 - s.z ** 3
        sqrt_term = is_perfect_square((4 * abs(n) - s.d ** 3) // (3 * s.d))
        assert sqrt_term == 17644534418149767
        x, y = reconstruct_xy(s.z, s.d, 33, sqrt_term)
        assert {x, y} == {s.x, s.y}
        assert verify_solution(x, y, s.z, 33)

    def test_reconstruct_parity_error(self):
        with pytest.raises(ParityError):
            reconstruct_xy(2, 4, 27, 1)

    def test_reconstruct_rejects_mismatch(self):
        with pytest.raises(ValueError):
            reconstruct_xy(-11, 2, 21, 31)
        with pytest.raises(ValueError):
            reconstruct_xy(2, 1, 8, 0)

    def test_verify(self):
        assert verify_solution(16, -14, -11, 21)
        assert verify_solution(K33_SOLUTION.x, K33_SOLUTION.y, K33_SOLUTION.z, 33)
        assert not verify_solution(16, -14, -10, 21)


class TestMordell:

    def test_worked_point(self):
        point = mordell_point(-11, 2, 21, 1, 16, -14)
        assert (point.X, point.Y, point.constant) == (264, 4320, 262656)
        assert mordell_constant(2, 21, 1) == 262656
        assert point.on_curve()

    def test_k33_point(self):
        s = K33_SOLUTION
        solution = Solution.create(s.x, s.y, s.z, SolutionPath.FAST, d=s.d)
        point = solution_mordell_point(solution, 33, -1)
        assert point.on_curve()
        assert point.X == 12 * s.d * abs(s.z)

    def test_equal_pair_lands_on_y_zero(self):
        point = mordell_point(-5, 8, 3, 1, 4, 4)
        assert point.Y == 0
        assert point.X == 480
        assert point.on_curve()

    def test_mismatch_raises(self):
        with pytest.raises(CurveMismatch):
            mordell_point(-11, 2, 21, 1, 16, -13)

    def test_requires_fast_solution(self):
        with pytest.raises(ValueError):
            solution_mordell_point(Solution.create(1, 1, 1, SolutionPath.BASIC), 3, 1)


class TestBasicAndThue:

    def test_basic_examples(self):
        assert _triples(basic_search(3, 2)) == {(1, 1, 1)}
        assert _triples(basic_search(15, 2)) == {(2, 2, -1)}
        assert (3, 1, 0) in _triples(basic_search(28, 3))

    def test_basic_finds_every_box_solution_with_small_z(self):
        for k in (3, 21, 28, 30, 33, 42):
            box = {t for t in box_search(k, 60).solutions if abs(t[2]) <= 4}
            assert box <= _triples(basic_search(k, 4))

    def test_basic_rejects_zero(self):
        with pytest.raises(ValueError):
            basic_search(3, 0)

    def test_cube_family(self):
        assert [f.z for f in cube_families(8, 3)] == [2]
        assert cube_families(8, 1) == []
        assert cube_families(21, 10) == []
        assert (2, 0, 0) in _triples(basic_search(8, 3))

    def test_thue_examples(self):
        assert _triples(thue_scan(3, 10)) == {(1, 1, 1), (-5, 4, 4)}
        assert _triples(thue_scan(15, 10)) == {(2, 2, -1)}
        assert thue_scan(33, 10 ** 5) == set()

    def test_thue_paths(self):
        assert {s.path for s in thue_scan(3, 10)} == {SolutionPath.THUE}


class TestFastPath:

    def test_worked_candidate(self, make_config):
        config = make_config(21, 100)
        hits, stats = _fast_hits(config)
        producing = []
        for hit in hits:
            if hit.sqrt_delta % (3 * hit.d) == 0:
                try:
                    x, y = reconstruct_xy(hit.z, hit.d, 21, hit.sqrt_delta // (3 * hit.d))
                except ParityError:
                    continue
                if verify_solution(x, y, hit.z, 21):
                    producing.append((hit.d, hit.z))
        assert (2, -11) in producing
        assert stats.stages_consistent()
        assert (16, -14, -11) in _triples(fast_search(config))

    def test_fast_results_are_fast_path(self, make_config):
        for solution in fast_search(make_config(21, 100)):
            assert solution.path == SolutionPath.FAST
            assert solution.d is not None
            assert verify_solution(solution.x, solution.y, solution.z, 21)

    @pytest.mark.parametrize("k", [3, 33, 42])
    def test_no_small_fast_solutions(self, make_config, k):
        config = make_config(k, 1000)
        solutions = fast_search(config)
        assert all(s.triple in {(-5, 4, 4)} for s in solutions)

    def test_filter_toggles_do_not_change_results(self, make_config):
        variants = [
            {},
            {"enable_legendre_sieve": False},
            {"enable_two_adic": False},
            {"enable_mod18": False},
            {"enable_legendre_sieve": False, "enable_two_adic": False, "enable_mod18": False},
        ]
        for k in (3, 21, 30):
            results = [_triples(full_search(make_config(k, 2000, **toggles))) for toggles in variants]
            assert all(r == results[0] for r in results)

    def test_unfiltered_square_hits_match_delta_scan(self, make_config):
        for k in (21, 33):
            config = make_config(k, 2000, enable_legendre_sieve=False, enable_two_adic=False, enable_mod18=False)
            hits, _ = _fast_hits(config)
            fast = {(h.d, h.z) for h in hits if h.d <= 200}
            reference = {(r.d, r.z) for r in delta_scan(k, 200, 2000) if r.is_square}
            assert fast == reference

    def test_filters_keep_every_solution_square(self, make_config):
        for k in (3, 21, 30, 33):
            config = make_config(k, 2000)
            hits, _ = _fast_hits(config)
            fast = {(h.d, h.z) for h in hits}
            for record in delta_scan(k, 200, 2000):
                if not record.is_square:
                    continue
                root = is_perfect_square(record.delta)
                if root % (3 * record.d):
                    continue
                try:
                    x, y = reconstruct_xy(record.z, record.d, k, root // (3 * record.d))
                except ParityError:
                    continue
                assert (record.d, record.z) in fast

    def test_counters_monotone(self, make_config):
        _, stats = _fast_hits(make_config(33, 10 ** 4))
        assert stats.d_count > 0
        assert stats.candidates >= stats.secondary_survivors >= stats.delta_tests >= stats.squares
        assert stats.stages_consistent()

    def test_excluded_d_skips_solution(self, make_config):
        config = make_config(21, 100, excluded_d=(2,))
        assert (16, -14, -11) not in _triples(fast_search(config))


class TestFullSearch:

    def test_k3(self, make_config):
        assert _triples(full_search(make_config(3, 1000))) == {(1, 1, 1), (-5, 4, 4)}

    def test_k21_matches_box(self, make_config):
        solutions = full_search(make_config(21, 100))
        assert (16, -14, -11) in _triples(solutions)
        small = {t for t in _triples(solutions) if abs(t[0]) <= 100}
        assert small == set(box_search(21, 100).solutions)

    @pytest.mark.parametrize("k", [6, 15, 24, 60])
    def test_matches_box(self, make_config, k):
        found = {s.triple for s in full_search(make_config(k, 500)) if s.max_abs <= 250}
        assert found == set(box_search(k, 250).solutions)

    def test_k24_includes_cube_divisible_d(self, make_config):
        # 2³ | 24, so the exponent of 2 in d is unrestricted
        assert (2, 2, 2) in _triples(full_search(make_config(24, 100)))
        assert 8 in {c.d for c in enumerate_d(make_config(24, 100))}

    @pytest.mark.parametrize("k", [33, 42])
    def test_empty(self, make_config, k):
        assert full_search(make_config(k, 1000)) == set()

    def test_impossible(self, make_config):
        with pytest.raises(ImpossibleK):
            make_config(13, 1000)

    def test_merge_keeps_first_path(self):
        merged = merge_solutions([
            Solution.create(1, 1, 1, SolutionPath.BASIC),
            Solution.create(1, 1, 1, SolutionPath.THUE),
        ])
        assert [s.path for s in merged] == [SolutionPath.BASIC]


class TestSearchService:

    def test_shard_plan(self, make_config):
        shards = plan_all_shards(make_config(33, 10 ** 4))
        assert [s.shard_id for s in shards[:3]] == ["basic", "thue", "S:1"]
        assert [s.index for s in shards] == list(range(len(shards)))
        assert plan_all_shards(make_config(33, 10 ** 4), include_small=False)[0].shard_id == "S:1"

    def test_run_shard_basic(self, make_config):
        config = make_config(3, 100)
        result = run_shard(config, plan_all_shards(config)[0])
        assert _triples(result.solutions) == {(1, 1, 1)}
        assert result.family is None

    def test_service_matches_full_search(self, make_config):
        config = make_config(21, 500)
        result = SearchService(config).run()
        assert _triples(result.solutions) == _triples(full_search(config))
        assert result.solutions == sorted(result.solutions, key=Solution.sort_key)
        assert result.shard_ids[0] == "basic"

    def test_progress_callback(self, make_config):
        calls = []
        config = make_config(33, 1000)
        SearchService(config, progress_callback=lambda c, t, m: calls.append((c, t))).run()
        total = len(plan_all_shards(config))
        assert calls[-1] == (total, total)
        assert [c for c, _ in calls] == list(range(1, total + 1))
