from collections import Counter

import pytest
from sympy import factorint, multiplicity

from app.services.dstream import (
    build_search_config,
    compute_d_max,
    enumerate_d,
    epsilon_of_k,
    exponent_allowed,
    load_excluded_d,
    plan_shards,
    shard_classes,
    split_streams,
)
from app.services.oracle import root_scan
from app.utils.errors import ConfigurationError, ImpossibleK, UnsupportedResidue


def _direct_admissible(k, d_max, excluded=()):
    """逐个 d 直接扫描根集，并检查素因子指数约束"""
    expected = {}
    for d in range(1, d_max + 1):
        if d % 3 == 0 or d in excluded:
            continue
        valid = True
        for p, e in factorint(d).items():
            order = multiplicity(p, k)
            if order in (1, 2) and e != order:
                valid = False
        if not valid:
            continue
        roots = root_scan(k, d)
        if roots:
            expected[d] = roots
    return expected


class TestEpsilon:

    @pytest.mark.parametrize("k,epsilon", [(3, 1), (21, 1), (30, 1), (33, -1), (42, -1), (114, -1)])
    def test_supported(self, k, epsilon):
        assert epsilon_of_k(k) == epsilon

    @pytest.mark.parametrize("k", [4, 5, 13, 14, 22])
    def test_impossible(self, k):
        with pytest.raises(ImpossibleK):
            epsilon_of_k(k)

    @pytest.mark.parametrize("k", [1, 2, 8, 9, 28])
    def test_unsupported(self, k):
        with pytest.raises(UnsupportedResidue):
            epsilon_of_k(k)


class TestDMax:

    @pytest.mark.parametrize("bound,d_max", [(1, 0), (20, 5), (100, 25), (385, 100), (10 ** 6, 259921)])
    def test_values(self, bound, d_max):
        assert compute_d_max(bound) == d_max

    def test_largest_d_with_integer_inequality(self):
        for bound in (7, 50, 999, 123457):
            d_max = compute_d_max(bound)
            assert (d_max + bound) ** 3 <= 2 * bound ** 3
            assert (d_max + 1 + bound) ** 3 > 2 * bound ** 3


class TestBuildConfig:

    def test_defaults(self, make_config):
        config = make_config(21, 100)
        assert config.epsilon == 1
        assert config.d_max == 25
        assert config.sieve_primes == (5, 7)
        assert config.sieve_modulus == 35
        assert config.secondary_moduli == (11, 13, 17)

    @pytest.mark.parametrize("bound", [0, -10, 1 << 62])
    def test_rejects_bound(self, make_config, bound):
        with pytest.raises(ConfigurationError):
            make_config(21, bound)

    @pytest.mark.parametrize("moduli", [[4], [9], [3], [1]])
    def test_rejects_secondary_moduli(self, make_config, moduli):
        with pytest.raises(ConfigurationError):
            make_config(21, 100, secondary_moduli=moduli)

    def test_impossible_k_propagates(self, make_config):
        with pytest.raises(ImpossibleK):
            make_config(13, 100)

    def test_digest_tracks_toggles(self, make_config):
        base = make_config(33, 1000)
        assert base.digest() == make_config(33, 1000).digest()
        assert base.digest() != make_config(33, 1000, enable_two_adic=False).digest()
        assert base.digest() != make_config(33, 1001).digest()


class TestExponentAllowed:

    def test_prime_orders(self):
        # ord_2(42) = 1, ord_7(42) = 1
        assert exponent_allowed(42, 2, 1)
        assert not exponent_allowed(42, 2, 2)
        assert not exponent_allowed(42, 7, 2)
        # ord_5(75) = 2：只允许 e = 2
        assert not exponent_allowed(75, 5, 1)
        assert exponent_allowed(75, 5, 2)
        assert not exponent_allowed(75, 5, 3)
        # ord_2(24) = 3：不受限制
        assert exponent_allowed(24, 2, 5)
        assert exponent_allowed(33, 5, 4)


class TestEnumerateD:

    def test_small_example(self, make_config):
        config = make_config(21, 20)
        classes = {c.d: c.roots for c in enumerate_d(config)}
        assert classes == {1: (0,), 2: (1,), 4: (1,), 5: (1,)}

    def test_divisor_of_k_keeps_first_power_only(self, make_config):
        classes = {c.d: c for c in enumerate_d(make_config(33, 500))}
        assert classes[11].roots == (0,)
        assert classes[22].roots == (11,)
        assert 121 not in classes

    def test_k42_has_no_squared_two(self, make_config):
        for divclass in enumerate_d(make_config(42, 10 ** 4)):
            assert divclass.d % 4 != 0
            assert divclass.d % 49 != 0

    def test_class_fields(self, make_config):
        for divclass in enumerate_d(make_config(33, 2000)):
            product = 1
            for p, e in divclass.factorization:
                product *= p ** e
            assert product == divclass.d
            assert divclass.delta == (1 if divclass.d % 3 == 1 else -1)
            assert all((r ** 3 - 33) % divclass.d == 0 for r in divclass.roots)

    @pytest.mark.parametrize("k", [3, 21, 33, 42])
    def test_matches_direct_scan(self, make_config, k):
        config = make_config(k, 20000)
        emitted = Counter(c.d for c in enumerate_d(config))
        assert all(count == 1 for count in emitted.values())

        classes = {c.d: c.roots for c in enumerate_d(config)}
        assert classes == _direct_admissible(k, config.d_max)

    def test_excluded_d_removed(self, make_config):
        config = make_config(21, 100, excluded_d=(2, 5))
        emitted = {c.d for c in enumerate_d(config)}
        assert 2 not in emitted and 5 not in emitted
        assert 4 in emitted

    def test_zero_d_max(self, make_config):
        assert list(enumerate_d(make_config(21, 1))) == []
        assert plan_shards(make_config(21, 1)) == []


class TestShards:

    @pytest.mark.parametrize("k,bound", [(33, 385), (21, 2000), (42, 20000), (3, 5000)])
    def test_streams_partition_enumeration(self, make_config, k, bound):
        config = make_config(k, bound)
        large, smooth = split_streams(config)
        large_d = [c.d for c in large]
        smooth_d = [c.d for c in smooth]
        assert not set(large_d) & set(smooth_d)
        combined = Counter(large_d + smooth_d)
        assert all(count == 1 for count in combined.values())
        assert set(combined) == {c.d for c in enumerate_d(config)}

    def test_large_stream_roots_match_scan(self, make_config):
        config = make_config(33, 20000)
        large, _ = split_streams(config)
        for divclass in large:
            assert divclass.roots == root_scan(33, divclass.d)

    def test_large_stream_contains_outer_prime(self, make_config):
        config = make_config(33, 385)
        large, smooth = split_streams(config)
        assert 22 in {c.d for c in large}
        assert 8 in {c.d for c in smooth}

    def test_plan_order_and_ids(self, make_config):
        config = make_config(33, 20000)
        shards = plan_shards(config)
        assert shards[0].shard_id == "S:1"
        assert [s.index for s in shards] == list(range(len(shards)))
        assert len({s.shard_id for s in shards}) == len(shards)
        kinds = [s.kind for s in shards]
        assert kinds == sorted(kinds, key=lambda kind: kind != "smooth")
        assert shards == plan_shards(config)

    def test_small_shard_size_gives_same_classes(self, settings):
        small = settings.model_copy(update={"large_prime_shard_size": 3})
        config = build_search_config(21, 2000, settings=small)
        shards = plan_shards(config)
        assert sum(1 for s in shards if s.kind == "large") > 1
        union = Counter(c.d for shard in shards for c in shard_classes(config, shard))
        assert all(count == 1 for count in union.values())
        assert set(union) == {c.d for c in enumerate_d(config)}


class TestExcludedFile:

    def test_load(self, tmp_path):
        path = tmp_path / "excluded.txt"
        path.write_text("# 已排除\n2\n\n 5  # 注释\n2\n", encoding="utf-8")
        assert load_excluded_d(str(path)) == (2, 5)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_excluded_d(str(tmp_path / "missing.txt"))

    @pytest.mark.parametrize("content", ["abc\n", "6\n", "0\n", "-2\n"])
    def test_invalid_content(self, tmp_path, content):
        path = tmp_path / "excluded.txt"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_excluded_d(str(path))
