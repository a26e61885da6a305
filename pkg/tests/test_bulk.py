import math

import numpy as np
import pytest

from cfstats import bulk
from cfstats.maps import BRUN2, GAUSS, JP2
from cfstats.orbits import enumerate_trajectories
from cfstats.stats import EnsembleTable


def tables_equal(a, b):
    return (
        np.array_equal(a.qs, b.qs)
        and np.array_equal(a.counts, b.counts)
        and np.array_equal(a.mult, b.mult)
    )


class TestTableAgreement:
    def test_gauss_matches_record_path(self):
        t1 = bulk.gauss_ensemble_table(60, targets=(1, 2))
        t2 = EnsembleTable.from_records(
            enumerate_trajectories(GAUSS, denominator_cap=60), (1, 2), "gauss"
        )
        assert tables_equal(t1, t2)

    def test_brun_matches_record_path(self):
        t1 = bulk.brun2_ensemble_table(18, targets=(1,))
        t2 = EnsembleTable.from_records(
            enumerate_trajectories(BRUN2, denominator_cap=18), (1,), "brun"
        )
        assert tables_equal(t1, t2)

    def test_jp_matches_record_path(self):
        t1 = bulk.jp_ensemble_table(22, targets=((1, 2), (0, 1)))
        t2 = EnsembleTable.from_records(
            enumerate_trajectories(JP2, denominator_cap=22), ((1, 2), (0, 1)), "jp"
        )
        assert tables_equal(t1, t2)

    def test_worker_count_does_not_change_output(self):
        t1 = bulk.gauss_ensemble_table(80, targets=(1,), workers=1, block_lanes=500)
        t2 = bulk.gauss_ensemble_table(80, targets=(1,), workers=2, block_lanes=500)
        assert tables_equal(t1, t2)


class TestVerifySweeps:
    def test_gauss(self):
        rep = bulk.gauss_verify(400)
        assert rep.checked == bulk.totient_sum(400)
        assert rep.roundtrip_failures == 0
        assert rep.max_weight_error < 1e-9
        assert rep.ok

    def test_brun(self):
        rep = bulk.brun2_verify(40)
        assert rep.roundtrip_failures == 0
        assert rep.max_weight_error < 1e-9

    def test_jp(self):
        rep = bulk.jp_verify(40)
        assert rep.roundtrip_failures == 0
        assert rep.max_weight_error < 1e-9

    def test_jp_expandable_count_matches_record_path(self):
        n_records = sum(1 for _ in enumerate_trajectories(JP2, denominator_cap=30))
        assert bulk.jp_count_points(30) == n_records


class TestTotient:
    def test_against_gcd_loop(self):
        brute = sum(
            1 for q in range(2, 200) for p in range(1, q) if math.gcd(p, q) == 1
        )
        assert bulk.totient_sum(199) == brute

    def test_small_values(self):
        assert bulk.totient_sum(5) == 1 + 2 + 2 + 4
