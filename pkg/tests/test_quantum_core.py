"""
Tests voor de dichte lineaire algebra en de scalaire functionalen.
"""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import DimensionError, StateValidationError, SupportError
from src.quantum_core import (
    DensityMatrix,
    PureStateVector,
    entanglement_fidelity,
    isotropic_state,
    max_relative_entropy,
    maximally_entangled_state,
    maximally_mixed_state,
    mix,
    partial_trace,
    purified_distance,
    basis_state,
    tensor,
    trace_distance,
    uhlmann_fidelity,
)
from tests.conftest import diagonal_state, random_density


class TestDensityMatrixValidation:
    """Een DensityMatrix weigert alles wat geen toestand is."""

    def test_accepts_valid_state(self):
        """Test dat een geldige toestand wordt geaccepteerd."""
        state = diagonal_state(0.8, 0.2)
        assert state.dim == 2
        assert not state.entries.flags.writeable, "entries moeten alleen-lezen zijn"

    def test_rejects_wrong_shape(self):
        """Test dat een verkeerde vorm wordt geweigerd."""
        with pytest.raises(DimensionError):
            DensityMatrix(3, np.eye(2) / 2)

    def test_rejects_non_hermitian(self):
        """Test dat een niet-Hermitische matrix wordt geweigerd."""
        with pytest.raises(StateValidationError):
            DensityMatrix(2, np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_rejects_wrong_trace(self):
        """Test dat een spoor ongelijk aan 1 wordt geweigerd."""
        with pytest.raises(StateValidationError):
            DensityMatrix(2, np.diag([0.5, 0.4]))

    def test_rejects_negative_eigenvalue(self):
        """Test dat een negatieve eigenwaarde wordt geweigerd."""
        with pytest.raises(StateValidationError):
            DensityMatrix(2, np.diag([1.5, -0.5]))

    def test_pure_state_norm(self):
        """Test dat een niet-genormaliseerde vector wordt geweigerd."""
        with pytest.raises(StateValidationError):
            PureStateVector(2, np.array([1.0, 1.0]))
        psi = PureStateVector(2, np.array([1.0, 1.0]) / np.sqrt(2))
        assert np.isclose(np.trace(psi.density().entries), 1.0)


class TestMaximallyEntangledState:
    """Test de maximaal verstrengelde toestand."""

    def test_qubit_entries(self):
        """d=2: 1/2 op (0,0), (0,3), (3,0), (3,3), verder 0."""
        entries = maximally_entangled_state(2).entries
        expected = np.zeros((4, 4))
        for row, col in [(0, 0), (0, 3), (3, 0), (3, 3)]:
            expected[row, col] = 0.5
        assert np.allclose(entries, expected, atol=1e-15)

    def test_qutrit_is_rank_one_projector(self):
        """Test dat de qutrit-toestand een projector van rang 1 is."""
        entries = maximally_entangled_state(3).entries
        assert np.isclose(np.trace(entries).real, 1.0)
        assert np.linalg.matrix_rank(entries) == 1

    def test_self_fidelity_is_one(self):
        """Test dat de toestand fidelity 1 met zichzelf heeft."""
        assert entanglement_fidelity(maximally_entangled_state(2), 2) == pytest.approx(1.0, abs=1e-12)


class TestEntanglementFidelity:
    """Test de verstrengelingsfidelity."""

    def test_maximally_mixed(self):
        """Test dat de maximaal gemengde toestand 1/d^2 geeft."""
        assert entanglement_fidelity(maximally_mixed_state(4), 2) == pytest.approx(0.25, abs=1e-12)

    def test_isotropic_inverse(self):
        """p = 7/15 geeft F = 0.6."""
        p = 7 / 15
        entries = p * maximally_entangled_state(2).entries + (1 - p) * np.eye(4) / 4
        assert entanglement_fidelity(DensityMatrix(4, entries), 2) == pytest.approx(0.6, abs=1e-12)

    def test_rejects_wrong_dimension(self):
        """Test dat een verkeerde dimensie wordt geweigerd."""
        with pytest.raises(DimensionError):
            entanglement_fidelity(maximally_mixed_state(3), 2)

    @given(
        a=st.floats(0.25, 1.0),
        b=st.floats(0.25, 1.0),
        p=st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]),
    )
    def test_affine_in_mixture(self, a, b, p):
        """Test dat de fidelity affien is in mixtures."""
        state_a, state_b = isotropic_state(a, 2), isotropic_state(b, 2)
        mixed = mix([p, 1 - p], [state_a, state_b]) if 0 < p < 1 else (state_a if p == 1 else state_b)
        assert entanglement_fidelity(mixed, 2) == pytest.approx(p * a + (1 - p) * b, abs=1e-12)


class TestIsotropicState:
    """Test de isotrope toestand."""

    def test_p_for_point_six(self):
        """Test de mengparameter bij F = 0.6."""
        expected = 7 / 15 * maximally_entangled_state(2).entries + 8 / 15 * np.eye(4) / 4
        assert np.allclose(isotropic_state(0.6, 2).entries, expected, atol=1e-12)

    def test_endpoints(self):
        """Test de randgevallen F = 1 en F = 1/d^2."""
        assert np.allclose(isotropic_state(1.0, 2).entries, maximally_entangled_state(2).entries, atol=1e-12)
        assert np.allclose(isotropic_state(0.25, 2).entries, np.eye(4) / 4, atol=1e-12)

    def test_rejects_fidelity_below_floor(self):
        """Test dat F onder 1/d^2 wordt geweigerd."""
        with pytest.raises(StateValidationError):
            isotropic_state(0.1, 2)

    @given(d=st.integers(2, 4), data=st.data())
    def test_roundtrip_with_fidelity(self, d, data):
        """Test dat de isotrope toestand de gevraagde fidelity heeft."""
        target = data.draw(st.floats(1.0 / d ** 2, 1.0))
        assert entanglement_fidelity(isotropic_state(target, d), d) == pytest.approx(target, abs=1e-12)


class TestDistances:
    """Test spoor- en gezuiverde afstand."""

    def test_trace_distance_examples(self):
        """Test bekende spoorafstanden."""
        sigma = diagonal_state(0.8, 0.2)
        assert trace_distance(sigma, sigma) == pytest.approx(0.0, abs=1e-12)
        assert trace_distance(basis_state(2, 0), basis_state(2, 1)) == pytest.approx(1.0, abs=1e-12)
        assert trace_distance(sigma, maximally_mixed_state(2)) == pytest.approx(0.3, abs=1e-12)

    def test_purified_distance_examples(self):
        """Test bekende gezuiverde afstanden."""
        sigma = diagonal_state(0.8, 0.2)
        assert purified_distance(sigma, sigma) == pytest.approx(0.0, abs=1e-7)
        assert purified_distance(basis_state(2, 0), basis_state(2, 1)) == pytest.approx(1.0, abs=1e-12)

    def test_purified_distance_against_eigen_oracle(self):
        """Voor commuterende toestanden is F_U = som sqrt(p_i q_i)."""
        fidelity = np.sqrt(0.8 * 0.5) + np.sqrt(0.2 * 0.5)
        expected = np.sqrt(1 - fidelity ** 2)
        sigma = diagonal_state(0.8, 0.2)
        assert uhlmann_fidelity(sigma, maximally_mixed_state(2)) == pytest.approx(fidelity, abs=1e-12)
        assert purified_distance(sigma, maximally_mixed_state(2)) == pytest.approx(expected, abs=1e-10)

    @given(seed=st.integers(0, 10 ** 6), dim=st.sampled_from([2, 3, 4]))
    def test_symmetry_and_ordering(self, seed, dim):
        """Test symmetrie en de ordening tussen de afstanden."""
        a = random_density(seed, dim)
        b = random_density(seed + 1, dim)
        assert trace_distance(a, b) == pytest.approx(trace_distance(b, a), abs=1e-12)
        assert purified_distance(a, b) == pytest.approx(purified_distance(b, a), abs=1e-9)
        assert trace_distance(a, b) <= purified_distance(a, b) + 1e-9

    def test_dimension_mismatch(self):
        """Test dat verschillende dimensies worden geweigerd."""
        with pytest.raises(DimensionError):
            trace_distance(maximally_mixed_state(2), maximally_mixed_state(3))


class TestMaxRelativeEntropy:
    """Test de maximale relatieve entropie D_max."""

    def test_identical_states(self):
        """Test dat gelijke toestanden D_max = 0 geven."""
        sigma = diagonal_state(0.7, 0.3)
        assert max_relative_entropy(sigma, sigma) == pytest.approx(0.0, abs=1e-10)

    def test_diagonal_pair(self):
        """Test D_max voor twee diagonale toestanden."""
        value = max_relative_entropy(diagonal_state(0.8, 0.2), maximally_mixed_state(2))
        assert value == pytest.approx(np.log2(1.6), abs=1e-12)

    def test_pure_against_maximally_mixed(self):
        """Test D_max van een zuivere tegen een maximaal gemengde toestand."""
        assert max_relative_entropy(basis_state(2, 0), maximally_mixed_state(2)) == pytest.approx(1.0, abs=1e-12)

    def test_support_violation(self):
        """Test dat een te grote drager een SupportError geeft."""
        with pytest.raises(SupportError):
            max_relative_entropy(maximally_mixed_state(2), basis_state(2, 0))

    @given(seed=st.integers(0, 10 ** 6))
    def test_operator_inequality(self, seed):
        """2^{-k} rho <= tau als operatorongelijkheid."""
        rho = random_density(seed, 4)
        tau = random_density(seed + 7, 4)
        k = max_relative_entropy(rho, tau)
        gap = tau.entries - 2.0 ** (-k) * rho.entries
        assert np.linalg.eigvalsh(gap).min() >= -1e-10

    @given(p=st.floats(0.05, 0.95), q=st.floats(0.05, 0.95))
    def test_zero_only_for_equal_commuting_states(self, p, q):
        """Test dat D_max alleen 0 is voor gelijke toestanden."""
        value = max_relative_entropy(diagonal_state(p, 1 - p), diagonal_state(q, 1 - q))
        if abs(p - q) < 1e-12:
            assert value == pytest.approx(0.0, abs=1e-10)
        else:
            assert value > 0.0


class TestPartialTrace:
    """Test het partiële spoor."""

    def test_bell_state_marginal(self):
        """Test dat de marginaal van een Bell-toestand maximaal gemengd is."""
        phi = maximally_entangled_state(2)
        for keep in ([0], [1]):
            assert np.allclose(partial_trace(phi, [2, 2], keep).entries, np.eye(2) / 2, atol=1e-12)

    def test_keep_everything(self):
        """Test dat alles behouden de toestand ongewijzigd laat."""
        state = random_density(3, 4)
        assert np.allclose(partial_trace(state, [2, 2], [0, 1]).entries, state.entries, atol=1e-12)

    def test_product_state(self):
        """Test de marginaal van een producttoestand."""
        a, b = random_density(1, 2), random_density(2, 3)
        reduced = partial_trace(tensor([a, b]), [2, 3], [0])
        assert np.allclose(reduced.entries, a.entries, atol=1e-12)

    def test_composes(self):
        """Test dat partiële sporen componeren."""
        state = random_density(11, 12)
        joint = partial_trace(state, [2, 3, 2], [1])
        stepwise = partial_trace(partial_trace(state, [2, 3, 2], [0, 1]), [2, 3], [1])
        assert np.allclose(joint.entries, stepwise.entries, atol=1e-12)

    def test_invalid_dims(self):
        """Test dat ongeldige dimensies worden geweigerd."""
        with pytest.raises(DimensionError):
            partial_trace(maximally_mixed_state(4), [2, 3], [0])
        with pytest.raises(DimensionError):
            partial_trace(maximally_mixed_state(4), [2, 2], [2])
