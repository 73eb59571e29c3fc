import numpy as np
import pytest

from qcausal import (
    DegenerateMeasurement,
    DensityMatrix,
    IncompleteInstrument,
    Instrument,
    InvalidInput,
    Ket,
    apply_instrument,
    basis_ket,
    ghz_state,
    projective_z_instrument,
    validate_instrument,
)
from helpers import brute_apply_instrument, random_density, random_ket, random_unitary


class TestProjectiveZ:
    def test_completeness_exact(self):
        instr = projective_z_instrument(0, 3)
        assert validate_instrument(instr) == 0.0

    def test_plus_state_is_unbiased(self):
        plus = Ket(1, np.array([1, 1]) / np.sqrt(2))
        ensemble = apply_instrument_on_single_site(plus)
        assert np.allclose(ensemble, [0.5, 0.5])

    def test_ghz_outcomes_are_even(self):
        rho = ghz_state(3).density_matrix()
        ensemble = apply_instrument(rho, projective_z_instrument(0, 3))
        assert np.allclose(ensemble.probabilities, [0.5, 0.5], atol=1e-12)

    def test_site_out_of_range(self):
        with pytest.raises(InvalidInput):
            projective_z_instrument(3, 3)


def apply_instrument_on_single_site(ket):
    # Single-qubit register: measure the only site, read off probabilities.
    rho = ket.density_matrix()
    instr = projective_z_instrument(0, 1)
    probs = []
    for op in instr.operators:
        probs.append(float(np.real(np.trace(op @ rho.matrix @ op.conj().T))))
    return probs


class TestValidateInstrument:
    def test_missing_outcome_defect_one(self):
        p0 = np.diag([1.0, 0.0]).astype(complex)
        instr = Instrument((0,), (p0,))
        assert abs(validate_instrument(instr) - 1.0) < 1e-12

    def test_rotated_projective_basis_complete(self):
        rng = np.random.default_rng(31)
        u = random_unitary(2, rng)
        ops = tuple(np.outer(u[:, x], u[:, x].conj()) for x in range(2))
        instr = Instrument((0,), ops)
        assert validate_instrument(instr) <= 1e-12

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidInput):
            Instrument((0,), (np.eye(2), np.eye(4)))


class TestApplyInstrument:
    def test_ghz_branches_are_basis_states(self):
        rho = ghz_state(3).density_matrix()
        ensemble = apply_instrument(rho, projective_z_instrument(0, 3))
        expected = {0: basis_ket([0, 0]), 1: basis_ket([1, 1])}
        for branch in ensemble:
            assert abs(branch.probability - 0.5) < 1e-12
            target = expected[branch.label].density_matrix()
            assert np.max(np.abs(branch.state.matrix - target.matrix)) < 1e-12

    def test_product_state_branches_equal_remainder(self):
        rng = np.random.default_rng(32)
        rho_a = random_density(1, rng)
        rho_bc = random_density(2, rng)
        rho = DensityMatrix(3, np.kron(rho_a.matrix, rho_bc.matrix))
        ensemble = apply_instrument(rho, projective_z_instrument(0, 3))
        for branch in ensemble:
            assert np.max(np.abs(branch.state.matrix - rho_bc.matrix)) < 1e-10

    def test_matches_kronecker_oracle_on_random_states(self):
        rng = np.random.default_rng(33)
        for site in range(3):
            rho = random_ket(3, rng).density_matrix()
            instr = projective_z_instrument(site, 3)
            ensemble = apply_instrument(rho, instr)
            oracle = brute_apply_instrument(rho.matrix, 3, site, instr.operators)
            assert abs(sum(b.probability for b in ensemble) - 1.0) <= 1e-10
            for branch in ensemble:
                p_ref, state_ref = oracle[branch.label]
                assert abs(branch.probability - p_ref) < 1e-10
                assert np.max(np.abs(branch.state.matrix - state_ref)) < 1e-10

    def test_unconditional_state_consistency(self):
        # sum_x p_x rho^x must equal the instrument-averaged reduced state.
        rng = np.random.default_rng(34)
        rho = random_density(3, rng)
        instr = projective_z_instrument(1, 3)
        ensemble = apply_instrument(rho, instr)
        averaged = sum(b.probability * b.state.matrix for b in ensemble)
        oracle = brute_apply_instrument(rho.matrix, 3, 1, instr.operators)
        unconditional = sum(p * state for p, state in oracle)
        assert np.max(np.abs(averaged - unconditional)) <= 1e-10

    def test_projective_branches_are_fixed_points(self):
        rng = np.random.default_rng(35)
        rho = random_density(2, rng)
        instr = projective_z_instrument(0, 2)
        first = apply_instrument(rho, instr, keep_target=True)
        for branch in first:
            again = apply_instrument(branch.state, instr, keep_target=True)
            assert len(again) == 1
            assert abs(again.branches[0].probability - 1.0) <= 1e-10
            assert np.max(np.abs(again.branches[0].state.matrix - branch.state.matrix)) <= 1e-10

    def test_incomplete_instrument_rejected(self):
        p0 = np.diag([1.0, 0.0]).astype(complex)
        broken = Instrument((0,), (p0,))
        rho = ghz_state(2).density_matrix()
        with pytest.raises(IncompleteInstrument):
            apply_instrument(rho, broken)

    def test_impossible_outcome_dropped(self):
        rho = basis_ket([0, 0]).density_matrix()
        ensemble = apply_instrument(rho, projective_z_instrument(0, 2))
        assert [b.label for b in ensemble] == [0]
        assert abs(ensemble.branches[0].probability - 1.0) < 1e-12

    def test_all_outcomes_below_floor_rejected(self):
        rho = basis_ket([0, 1]).density_matrix()
        instr = projective_z_instrument(0, 2)
        ensemble = apply_instrument(rho, instr)
        assert len(ensemble) == 1
        with pytest.raises(DegenerateMeasurement):
            apply_instrument(rho, instr, probability_floor=1.5)

    def test_whole_register_target_rejected(self):
        rho = basis_ket([0]).density_matrix()
        with pytest.raises(InvalidInput):
            apply_instrument(rho, projective_z_instrument(0, 1))

    def test_target_outside_register_rejected(self):
        rho = ghz_state(2).density_matrix()
        with pytest.raises(InvalidInput):
            apply_instrument(rho, projective_z_instrument(2, 3))


class TestMultiSiteTarget:
    def test_two_site_projective_instrument(self):
        # Projectors onto the four two-site basis states, applied to GHZ(3)
        # sites {0,1}: only |00> and |11> survive.
        ops = tuple(np.diag([1.0 if i == x else 0.0 for i in range(4)]).astype(complex)
                    for x in range(4))
        instr = Instrument((0, 1), ops)
        rho = ghz_state(3).density_matrix()
        ensemble = apply_instrument(rho, instr)
        assert [b.label for b in ensemble] == [0, 3]
        assert np.allclose(ensemble.probabilities, [0.5, 0.5], atol=1e-12)
        for branch, bit in zip(ensemble, (0, 1)):
            assert np.max(np.abs(branch.state.matrix - basis_ket([bit]).density_matrix().matrix)) < 1e-12
