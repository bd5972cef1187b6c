"""
Tests voor de embezzling katalysator.

De gesloten triple som, de O(M d) gereduceerde toestand en het dichte
amplitude-orakel moeten overal samenvallen waar ze alle drie rekenbaar zijn.
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from src import esa
from src.errors import DimensionError
from src.esa import IndexDecomposition
from src.models import EmbezzlingSpec, ThresholdConfig, harmonic_number
from src.quantum_core import entanglement_fidelity, partial_trace, trace_distance, uhlmann_fidelity

C4 = 25 / 12


class TestEmbezzlingSpec:
    """Test het parametermodel van de embezzling toestand."""

    def test_fills_harmonic_normalizer(self):
        """Test dat c_M automatisch wordt ingevuld."""
        assert EmbezzlingSpec(d=2, M=4).c_M == pytest.approx(C4, abs=1e-15)

    def test_rejects_wrong_normalizer(self):
        """Test dat een verkeerde c_M wordt geweigerd."""
        with pytest.raises(ValidationError):
            EmbezzlingSpec(d=2, M=4, c_M=2.0)

    def test_accepts_matching_normalizer(self):
        """Test dat een kloppende c_M wordt geaccepteerd."""
        assert EmbezzlingSpec(d=2, M=4, c_M=C4).M == 4

    def test_large_m_uses_digamma(self):
        """Boven de exacte grens moet de asymptotische vorm aansluiten."""
        exact = harmonic_number(1_000_000)
        assert harmonic_number(1_000_001) == pytest.approx(exact + 1 / 1_000_001, rel=1e-12)


class TestSchmidtRank:
    """Test de voldoende Schmidt rang voor één ronde."""

    def test_small_examples(self):
        """Test kleine rangen waar de exponent geheel is."""
        assert esa.schmidt_rank_for(2, 0.75).m == 4
        assert esa.schmidt_rank_for(3, 0.75).m == 9
        assert not esa.schmidt_rank_for(2, 0.75).astronomical

    def test_astronomical_regime(self):
        """Test de rang bij eps = 0.05, ver buiten simulatiebereik."""
        rank = esa.schmidt_rank_for(2, 0.05)
        assert rank.log2_m == pytest.approx(39.494, abs=1e-3)
        assert rank.astronomical
        assert rank.m == pytest.approx(2 ** rank.log2_m, rel=1e-9)
        assert 7e11 < rank.m < 8e11

    def test_exact_ceiling_above_float_precision(self):
        """Test dat M boven 2^53 het exacte plafond is en geen afgeronde float."""
        rank = esa.schmidt_rank_for(2, 0.0328)
        assert rank.log2_m > 53
        assert rank.m == 1598518451713932016

    def test_beyond_exact_range(self):
        """Test dat boven 2^64 geen geheel getal wordt teruggegeven."""
        rank = esa.schmidt_rank_for(2, 0.001)
        assert rank.m is None and rank.astronomical

    @pytest.mark.parametrize("epsilon", [0.0, 1.0, -0.5, 1.5])
    def test_rejects_epsilon_outside_interval(self, epsilon):
        """Test dat epsilon buiten (0, 1) wordt geweigerd."""
        with pytest.raises(ValueError):
            esa.schmidt_rank_for(2, epsilon)


class TestEmbezzlePermutation:
    """Test de embezzling permutatie U."""

    def test_examples(self):
        """Test bekende beelden van U bij d = 2, M = 4."""
        assert esa.embezzle_permutation(1, 1, 2, 4) == (1, 1)
        assert esa.embezzle_permutation(1, 3, 2, 4) == (1, 2)
        assert esa.embezzle_permutation(2, 4, 2, 4) == (2, 4)

    def test_out_of_range(self):
        """Test dat indices buiten het bereik worden geweigerd."""
        with pytest.raises(DimensionError):
            esa.embezzle_permutation(3, 1, 2, 4)
        with pytest.raises(DimensionError):
            esa.embezzle_permutation(1, 5, 2, 4)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_bijection(self, d):
        """Test dat U een bijectie is."""
        for M in range(1, 65):
            images = {esa.embezzle_permutation(i, j, d, M) for i in range(1, d + 1) for j in range(1, M + 1)}
            assert len(images) == d * M, f"d={d}, M={M}: U is geen bijectie"

    @pytest.mark.parametrize("d, M", [(2, 4), (3, 5), (4, 7)])
    def test_table_matches_formula(self, d, M):
        """Test dat de vlakke tabel gelijk is aan de formule."""
        table = esa.permutation_table(d, M)
        for i in range(1, d + 1):
            for j in range(1, M + 1):
                k, l = esa.embezzle_permutation(i, j, d, M)
                assert table[(i - 1) * M + (j - 1)] == (k - 1) * M + (l - 1)


class TestIndexDecomposition:
    """Test de ontbinding van katalysatorindices in cijfers."""

    def test_example(self):
        """Test één bekende ontbinding."""
        parts = IndexDecomposition.decompose(3, 2, 1)
        assert parts.digits == (1,)
        assert parts.catalyst == 2

    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("rounds", range(1, 7))
    def test_reconstruction(self, d, rounds):
        """Test dat de ontbinding de index terug oplevert."""
        for j in range(1, 201):
            parts = IndexDecomposition.decompose(j, d, rounds)
            assert parts.reconstruct(d) == j
            assert all(1 <= x <= d for x in parts.digits)
            assert parts.catalyst == math.ceil(j / d ** rounds)

    def test_digits_are_base_d(self):
        """Test dat de cijfers de basis-d cijfers zijn."""
        for j in range(1, 100):
            parts = IndexDecomposition.decompose(j, 3, 4)
            assert [x - 1 for x in parts.digits] == [((j - 1) // 3 ** s) % 3 for s in range(4)]


class TestOracleAndReducedState:
    """Test het dichte orakel en de gereduceerde hoofdtoestand."""

    def test_trivial_catalyst(self):
        """Test dat M = 1 geen verstrengeling oplevert."""
        state = esa.simulate_rounds_oracle(EmbezzlingSpec(d=2, M=1), 1)
        assert np.allclose(state.entries, [[1, 0], [0, 0]], atol=1e-15)
        assert state.fidelity() == pytest.approx(0.5, abs=1e-15)

    def test_four_term_contraction(self, small_embezzler):
        """Test de contractie met vier termen bij M = 4."""
        expected = np.array([
            [1 + 1 / 3, 1 / np.sqrt(2) + 1 / (2 * np.sqrt(3))],
            [1 / np.sqrt(2) + 1 / (2 * np.sqrt(3)), 1 / 2 + 1 / 4],
        ]) / C4
        oracle = esa.simulate_rounds_oracle(small_embezzler, 1)
        assert np.allclose(oracle.entries, expected, atol=1e-12)
        assert oracle.fidelity() == pytest.approx(0.977975, abs=1e-6)
        assert np.allclose(esa.reduced_main_state(small_embezzler, 1).entries, expected, atol=1e-12)

    def test_second_round_still_coherent(self, small_embezzler):
        """Bij d^r = M is de winst nog niet weg: pas bij d^{r-1} >= M."""
        expected = 0.5 + (2 / np.sqrt(3) + 2 / np.sqrt(8)) / (2 * C4)
        assert esa.simulate_rounds_oracle(small_embezzler, 2).fidelity() == pytest.approx(expected, abs=1e-12)
        assert esa.simulate_rounds_oracle(small_embezzler, 3).fidelity() == pytest.approx(0.5, abs=1e-15)

    def test_oracle_overflow(self):
        """Test dat een te groot orakel wordt geweigerd."""
        with pytest.raises(DimensionError):
            esa.simulate_rounds_oracle(EmbezzlingSpec(d=2, M=1000), 10)

    @pytest.mark.parametrize("d", [2, 3])
    def test_reduced_matches_oracle(self, d):
        """Test dat de gereduceerde toestand gelijk is aan het orakel."""
        for M in range(1, 65):
            spec = EmbezzlingSpec(d=d, M=M)
            for rounds in range(1, 4):
                reduced = esa.reduced_main_state(spec, rounds).entries
                oracle = esa.simulate_rounds_oracle(spec, rounds).entries
                assert np.allclose(reduced, oracle, atol=1e-12), f"d={d}, M={M}, r={rounds}"
                assert np.trace(reduced).real == pytest.approx(1.0, abs=1e-12)

    def test_qutrit_dense_case(self):
        """Test een dicht geval met qutrits."""
        spec = EmbezzlingSpec(d=3, M=27)
        assert np.allclose(esa.reduced_main_state(spec, 2).entries,
                           esa.simulate_rounds_oracle(spec, 2).entries, atol=1e-12)

    def test_compressed_fidelity_matches_dense(self, small_embezzler):
        """Test dat de gecomprimeerde fidelity gelijk is aan de dichte."""
        state = esa.reduced_main_state(small_embezzler, 1)
        dense = state.to_density_matrix()
        assert entanglement_fidelity(dense, 2) == pytest.approx(state.fidelity(), abs=1e-12)


class TestClosedFormFidelity:
    """Test de gesloten vorm van de fidelity na r rondes."""

    def test_spot_values(self, small_embezzler):
        """Test bekende fidelities na één ronde."""
        assert esa.closed_form_fidelity(small_embezzler, 1) == pytest.approx(
            0.5 + (np.sqrt(2) + 1 / np.sqrt(3)) / (2 * C4), abs=1e-12)
        assert esa.closed_form_fidelity(EmbezzlingSpec(d=2, M=2), 1) == pytest.approx(0.971405, abs=5e-7)

    def test_literal_terms(self, small_embezzler):
        """Test de termen van de triple som bij M = 4."""
        terms = list(esa.closed_form_terms(small_embezzler, 1))
        assert [(t.s, t.t, t.h) for t in terms] == [(1, 1, 1), (2, 1, 1)]
        assert terms[0].x == pytest.approx(np.sqrt(2), abs=1e-15)
        assert terms[1].x == pytest.approx(1 / np.sqrt(3), abs=1e-15)
        assert all(t.k_s > 0 and t.k_st > 0 and t.x > 0 for t in terms)

    @pytest.mark.parametrize("d", [2, 3])
    def test_vectorized_matches_literal_loop(self, d):
        """Test dat de gevectoriseerde som gelijk is aan de letterlijke lus."""
        for M in range(1, 61):
            spec = EmbezzlingSpec(d=d, M=M)
            for rounds in range(1, 5):
                literal = 1 / d + math.fsum(t.x for t in esa.closed_form_terms(spec, rounds)) / (d * spec.c_M)
                assert esa.closed_form_fidelity(spec, rounds) == pytest.approx(literal, abs=1e-13)

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [2, 3])
    def test_matches_oracle(self, d):
        """Test dat de gesloten vorm gelijk is aan het orakel."""
        for M in range(1, 201):
            spec = EmbezzlingSpec(d=d, M=M)
            for rounds in range(1, 6):
                oracle = esa.simulate_rounds_oracle(spec, rounds).fidelity()
                assert abs(esa.closed_form_fidelity(spec, rounds) - oracle) <= 1e-10, f"d={d}, M={M}, r={rounds}"

    def test_plateau_at_thousand(self):
        """Test dat M = 1000 vanaf ronde 11 op 1/2 blijft."""
        spec = EmbezzlingSpec(d=2, M=1000)
        assert esa.plateau_round(2, 1000) == 11
        for rounds in range(11, 16):
            assert esa.closed_form_fidelity(spec, rounds) == 0.5
        for rounds in range(1, 11):
            assert esa.closed_form_fidelity(spec, rounds) > 0.5

    def test_bounded(self):
        """Test dat de fidelity tussen 1/d en 1 ligt."""
        for d in (2, 3, 5):
            for M in (1, 7, 100):
                for rounds in range(1, 6):
                    value = esa.closed_form_fidelity(EmbezzlingSpec(d=d, M=M), rounds)
                    assert 1 / d <= value <= 1

    @pytest.mark.parametrize("d", [2, 3])
    def test_non_increasing_in_rounds(self, d):
        """Test dat de fidelity niet stijgt met het aantal rondes."""
        for M in range(1, 201):
            spec = EmbezzlingSpec(d=d, M=M)
            values = [esa.closed_form_fidelity(spec, r) for r in range(1, esa.plateau_round(d, M) + 1)]
            assert all(b <= a + 1e-12 for a, b in zip(values, values[1:])), f"d={d}, M={M}"

    def test_non_decreasing_in_powers_of_d(self):
        """Test dat de fidelity niet daalt over M = d^k."""
        for rounds in range(1, 8):
            values = [esa.closed_form_fidelity(EmbezzlingSpec(d=2, M=2 ** k), rounds) for k in range(0, 11)]
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:])), f"r={rounds}"

    def test_odd_rank_is_not_monotone(self):
        """M = 3 ligt onder M = 2: het tweede blok is half gevuld."""
        two = esa.closed_form_fidelity(EmbezzlingSpec(d=2, M=2), 1)
        three = esa.closed_form_fidelity(EmbezzlingSpec(d=2, M=3), 1)
        assert three < two

    @pytest.mark.parametrize("epsilon", [0.75, 0.3])
    def test_single_round_guarantee(self, epsilon):
        """Test dat de voldoende rang na één ronde 1 - eps haalt."""
        rank = esa.schmidt_rank_for(2, epsilon)
        assert esa.closed_form_fidelity(EmbezzlingSpec(d=2, M=rank.m), 1) >= 1 - epsilon

    @pytest.mark.slow
    def test_large_rank_is_fast_enough(self):
        """Test een grote rang via de gevectoriseerde som."""
        value = esa.closed_form_fidelity(EmbezzlingSpec(d=2, M=10 ** 7), 1)
        assert 0.5 < value < 1.0


class TestReuseRounds:
    """Test het maximale aantal herbruikbare rondes."""

    def test_small_catalyst(self, small_embezzler, esa_threshold):
        """Test r_E = 2 bij M = 4."""
        assert esa.max_reuse_rounds_distill(small_embezzler, esa_threshold) == 2

    def test_unreachable(self, small_embezzler):
        """Test r_E = 0 als de winst nooit boven de drempel komt."""
        assert esa.max_reuse_rounds_distill(small_embezzler, ThresholdConfig(epsilon=0.05, f_rho=0.99)) == 0

    def test_thousand_matches_scan(self, esa_threshold):
        """Test r_E bij M = 1000 tegen een losse scan."""
        spec = EmbezzlingSpec(d=2, M=1000)
        steps = esa.reuse_scan(spec, esa_threshold)
        expected = 0
        for step in steps:
            if not step.gain > 0.05:
                break
            expected = step.round
        assert esa.max_reuse_rounds_distill(spec, esa_threshold) == expected
        assert 1 <= expected <= 10

    def test_lifetime_grows_with_rank(self, esa_threshold):
        """Test dat r_E niet daalt als de rang groeit."""
        lifetimes = [esa.max_reuse_rounds_distill(EmbezzlingSpec(d=2, M=2 ** k), esa_threshold)
                     for k in range(1, 15)]
        assert lifetimes == sorted(lifetimes)


class TestCatalystDrift:
    """Test de drift van de embezzling katalysator."""

    def test_untouched(self, small_embezzler):
        """Test dat een ongebruikte katalysator niet verandert."""
        assert esa.catalyst_drift(small_embezzler, 0) == (1.0, 0.0)

    def test_dense_cross_check(self):
        """Test de drift tegen een dichte berekening."""
        spec = EmbezzlingSpec(d=2, M=2)
        full = esa.twin_density(esa.joint_amplitudes(spec, 1))
        catalyst = partial_trace(full, [2, 2, 2, 2], [1, 3])
        original = esa.twin_density(esa.embezzling_vector(spec))
        fidelity, distance = esa.catalyst_drift(spec, 1)
        assert fidelity == pytest.approx(uhlmann_fidelity(catalyst, original), abs=1e-10)
        assert distance == pytest.approx(trace_distance(catalyst, original), abs=1e-10)
        assert distance == pytest.approx(np.sqrt(1 / 3), abs=1e-12)

    def test_values_in_unit_interval(self):
        """Test dat fidelity en afstand in [0, 1] liggen."""
        spec = EmbezzlingSpec(d=2, M=64)
        for rounds in range(1, 7):
            fidelity, distance = esa.catalyst_drift(spec, rounds)
            assert 0.0 <= fidelity <= 1.0
            assert 0.0 <= distance <= 1.0

    def test_rank_limit(self):
        """Test dat een te grote rang wordt geweigerd."""
        with pytest.raises(DimensionError):
            esa.catalyst_drift(EmbezzlingSpec(d=2, M=5000), 1)
