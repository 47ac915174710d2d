"""Tests for section search, tournament spectra and robustness bounds."""

import itertools
import math

import numpy as np
import pytest

from majorana_jm.algebra import subsets_of_size
from majorana_jm.robustness import (
    RobustnessReport,
    SignSection,
    TournamentMatrix,
    appendix_tournament_4,
    build_report,
    degree2_norm,
    exhaustive_tournament_max,
    ho_bound,
    ho_bound_proven,
    operator_norm,
    random_tournament,
    robustness_bruteforce,
    section_from_tournament,
    skew_hadamard_search,
    syk_operator,
    thm2_upper_bound,
    tournament_bound_check,
    tournament_from_section,
)


class TestSections:
    def test_round_trip_string(self):
        s = SignSection(2, 2, (1, -1, 1, 1, -1, 1))
        assert SignSection.from_string(2, 2, str(s)) == s

    def test_tournament_round_trip(self):
        rng = np.random.default_rng(0)
        t = random_tournament(6, rng)
        assert np.array_equal(
            tournament_from_section(section_from_tournament(t)).entries, t.entries
        )

    def test_rejects_symmetric(self):
        with pytest.raises(ValueError):
            TournamentMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))


class TestDegree2Spectrum:
    def test_two_player_tournament(self):
        t = TournamentMatrix(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        total, lams = degree2_norm(t)
        assert total == pytest.approx(1.0, abs=1e-14)

    def test_appendix_matrix_saturates(self):
        t = appendix_tournament_4()
        total, _ = degree2_norm(t)
        assert total == pytest.approx(2 * math.sqrt(3), abs=1e-12)
        assert abs(tournament_bound_check(t)) < 1e-12
        h = t.entries + np.eye(4)
        assert np.max(np.abs(h @ h.T - 4 * np.eye(4))) < 1e-12

    def test_spectral_path_equals_dense_norm(self):
        # for every section the tournament sum matches the dense eigenvalue
        rng = np.random.default_rng(3)
        for n in (2, 3):
            count = math.comb(2 * n, 2)
            for _ in range(50):
                signs = tuple(int(s) for s in rng.choice((1, -1), size=count))
                section = SignSection(n, 2, signs)
                dense = operator_norm(syk_operator(section))
                total, _ = degree2_norm(tournament_from_section(section))
                assert abs(dense - total) < 1e-9

    def test_bound_never_violated_on_random_tournaments(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            size = 2 * int(rng.integers(1, 21))
            margin = tournament_bound_check(random_tournament(size, rng))
            assert margin > -1e-9

    def test_upper_triangular_tournament_positive_margin(self):
        arr = np.triu(np.ones((4, 4)), k=1)
        t = TournamentMatrix(arr - arr.T)
        assert tournament_bound_check(t) > 0.1


class TestBruteForce:
    def test_n2_degree2_exact(self):
        rep = robustness_bruteforce(2, 2)
        assert rep.value == pytest.approx(1 / math.sqrt(3), abs=1e-9)
        assert rep.method == "degree2-spectral"

    @pytest.mark.parametrize("n", [2, 3])
    def test_degree1_closed_form(self, n):
        rep = robustness_bruteforce(n, 1)
        assert rep.value == pytest.approx(1 / math.sqrt(2 * n), abs=1e-9)

    def test_n3_degree2_strictly_below_bound(self):
        rep = robustness_bruteforce(3, 2)
        assert rep.value < 1 / math.sqrt(5) - 1e-6
        assert rep.bounds["construction_lower"] <= rep.value + 1e-9

    def test_reduced_equals_full_enumeration(self):
        # soundness of the sign-fixing quotient at n=2
        n = 2
        for degree in (1, 2):
            rep = robustness_bruteforce(n, degree)
            supports = subsets_of_size(2 * n, degree)
            best = -1.0
            for signs in itertools.product((1, -1), repeat=len(supports)):
                val = operator_norm(syk_operator(SignSection(n, degree, signs)))
                best = max(best, val)
            assert rep.value == pytest.approx(best / len(supports), abs=1e-9)

    def test_budget_fallback(self):
        rep = robustness_bruteforce(5, 2, budget=4)
        assert rep.method == "bound-only"
        assert rep.value is None
        assert rep.bounds["thm2_upper"] is not None

    def test_degree3_full_enumeration(self):
        # odd degree has no proven upper bound; value still computed exactly
        rep = robustness_bruteforce(2, 3)
        assert rep.method == "brute-force"
        assert rep.bounds["thm2_upper"] is None
        assert 0 < rep.value <= 1

    def test_optimizer_section_reproduces_value(self):
        rep = robustness_bruteforce(2, 2)
        section = SignSection.from_string(2, 2, rep.section)
        total, _ = degree2_norm(tournament_from_section(section))
        assert total / 6 == pytest.approx(rep.value, abs=1e-12)


class TestSkewHadamard:
    def test_order4_found(self):
        res = skew_hadamard_search(4)
        assert res.status == "found"
        total, _ = degree2_norm(res.tournament)
        assert total == pytest.approx(2 * math.sqrt(3), abs=1e-12)

    def test_order6_none(self):
        res = skew_hadamard_search(6)
        assert res.status == "none"

    def test_order8_by_doubling(self):
        res = skew_hadamard_search(8)
        assert res.status == "found"
        e = res.tournament.entries
        assert np.max(np.abs(e @ e.T - 7 * np.eye(8))) < 1e-12

    @pytest.mark.parametrize("order", [12, 16, 20, 24, 32])
    def test_constructible_orders(self, order):
        res = skew_hadamard_search(order)
        assert res.status == "found"
        e = res.tournament.entries
        assert np.max(np.abs(e @ e.T - (order - 1) * np.eye(order))) < 1e-9

    def test_known_and_open_orders(self):
        assert skew_hadamard_search(36).status == "exists"
        assert skew_hadamard_search(276).status == "open"
        # 280 = 2 * 140 is reachable by doubling the Paley order 140
        assert skew_hadamard_search(280).status == "found"
        assert skew_hadamard_search(292).status == "unknown"

    def test_exhaustive_order6_strict_gap(self):
        best, _ = exhaustive_tournament_max(6)
        assert best < 3 * math.sqrt(5) - 1e-6


class TestBounds:
    def test_ho_identity_k1(self):
        for n in range(1, 51):
            assert ho_bound(n, 1) == pytest.approx(
                1 / math.sqrt(2 * n - 1), abs=1e-14
            )

    def test_ho_example(self):
        assert ho_bound(10, 2) == pytest.approx(math.sqrt(45 / 4845), abs=1e-14)

    def test_conjecture_flag(self):
        assert ho_bound_proven(5)
        assert not ho_bound_proven(6)
        assert thm2_upper_bound(8, 12) is None
        assert thm2_upper_bound(8, 12 - 2) is not None

    def test_report_order_invariant(self):
        with pytest.raises(ValueError):
            RobustnessReport(
                2, 2, "brute-force", 0.1, None, {"construction_lower": 0.5}
            )

    def test_bound_only_report_fields(self):
        rep = build_report(5, 4, method="bound-only")
        assert rep.bounds["shadow_lower"] == pytest.approx(
            math.comb(5, 2) / math.comb(10, 4)
        )
        assert rep.bounds["ho_value"] is not None
