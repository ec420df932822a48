import pytest

from app.services.oracle import box_search, delta_scan, root_scan


class TestBoxSearch:

    def test_k3(self):
        assert box_search(3, 10).solutions == frozenset({(1, 1, 1), (-5, 4, 4)})

    def test_k21(self):
        assert (16, -14, -11) in box_search(21, 100).solutions

    def test_empty_for_k33(self):
        assert box_search(33, 200).solutions == frozenset()

    def test_every_triple_is_a_canonical_solution(self):
        for triple in box_search(30, 50).solutions | box_search(15, 50).solutions:
            x, y, z = triple
            assert abs(x) >= abs(y) >= abs(z)
            assert x ** 3 + y ** 3 + z ** 3 in (15, 30)

    @pytest.mark.parametrize("bound", [-1, 10 ** 4 + 1])
    def test_bound_limits(self, bound):
        with pytest.raises(ValueError):
            box_search(3, bound)


class TestRootScan:

    def test_examples(self):
        assert root_scan(33, 31) == (4, 7, 20)
        assert root_scan(21, 4) == (1,)
        assert root_scan(5, 1) == (0,)

    def test_limit(self):
        with pytest.raises(ValueError):
            root_scan(3, 10 ** 6 + 1)


class TestDeltaScan:

    def test_worked_candidate_is_square(self):
        records = {(r.d, r.z): r for r in delta_scan(21, 2, 100)}
        record = records[(2, -11)]
        assert record.delta == 32400
        assert record.is_square

    def test_window_conditions(self):
        for record in delta_scan(33, 50, 500):
            assert record.d % 3 != 0
            assert (record.z ** 3 - 33) % record.d == 0
            assert record.z * record.z > 33
            assert (record.d + abs(record.z)) ** 3 < 2 * abs(record.z) ** 3

    def test_rejects_unsupported_k(self):
        with pytest.raises(ValueError):
            delta_scan(28, 10, 10)

    def test_rejects_large_work(self):
        with pytest.raises(ValueError):
            delta_scan(33, 10 ** 5, 10 ** 4)
