import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecs_transfer.analytic import (
    DRESSED_LABELS,
    OUTCOMES,
    Branch,
    EcsState,
    ProjectionKind,
    QubitPairState,
    bare_amplitudes,
    bare_coefficients,
    deposit_lab_fields,
    deposit_state_analytic,
    norm_constant,
    p_coeffs,
    p_coeffs_recipe,
    retrieval_probability,
    retrieval_state_analytic,
    sectors_to_composite,
)
from ecs_transfer.errors import DegenerateBranch, TPrimeMismatch, ZeroState
from ecs_transfer.hilbert import BARE, DRESSED, CompositeState, FockCutoff, coherent_state, evolve, fidelity, tensor
from ecs_transfer.model import SystemParams, bare_from_dressed, build_effective_hamiltonian, dressed_from_bare, to_lab_frame

G = np.array([1.0, 0.0])
E = np.array([0.0, 1.0])
DRESSED_VECS = {"+": np.array([1.0, 0.0]), "-": np.array([0.0, 1.0])}

times = st.floats(min_value=0.0, max_value=8.0, allow_nan=False)


def eq6_state(cutoff):
    vac = coherent_state(0, cutoff)
    return CompositeState((tensor(E, G, vac, vac) + tensor(G, E, vac, vac)) / math.sqrt(2), cutoff.nmax)


class TestEcsState:
    def test_norm_via_overlaps(self):
        s = EcsState(((1 / math.sqrt(2), 1j, 0), (1 / math.sqrt(2), -1j, 0)))
        assert s.norm2() == pytest.approx(1 + math.exp(-2))

    def test_normalized_flag_verified(self):
        with pytest.raises(ValueError):
            EcsState(((1.0, 0, 0), (1.0, 0, 0)), normalized=True)

    def test_term_count(self):
        with pytest.raises(ValueError):
            EcsState(())

    def test_fock_rendering(self):
        s = EcsState(((0.3, 0.5j, -1), (0.2j, -0.5j, 1)))
        cutoff = FockCutoff(40)
        f = s.to_fock(cutoff)
        assert np.vdot(f, f).real == pytest.approx(s.norm2(), abs=1e-12)


class TestDeposit:
    def test_t0_plus_is_vacuum_product(self, default_params):
        state, prob = deposit_state_analytic(default_params, 0.0, Branch.PLUS)
        assert prob == 0.5
        assert state.labels(1) == [0j] and state.labels(2) == [0j]

    def test_t0_minus_degenerate(self, default_params):
        with pytest.raises(DegenerateBranch):
            deposit_state_analytic(default_params, 0.0, Branch.MINUS)

    def test_norm_constant_minus_t1(self, default_params):
        m = norm_constant(default_params, 1.0, Branch.MINUS)
        assert m == pytest.approx(2 * (1 - math.cos(80) * math.exp(-1)), rel=1e-14)
        assert m == pytest.approx(2.0814, abs=5e-4)
        state, prob = deposit_state_analytic(default_params, 1.0, Branch.MINUS)
        assert state.norm_const == m and prob == m / 8

    @settings(max_examples=80, deadline=None)
    @given(times, st.floats(0.1, 3), st.floats(0.1, 3))
    def test_outcome_probabilities_complete(self, t, l1, l2):
        params = SystemParams(l1, l2, 20, 13)
        total = sum(norm_constant(params, t, Branch.for_outcome(o)) / 8 for o in OUTCOMES)
        assert abs(total - 1) <= 1e-12
        fields = deposit_lab_fields(params, t)
        assert abs(sum(f.norm2() for f in fields.values()) - 1) <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.01, 6), st.sampled_from(list(Branch)))
    def test_normalized(self, t, branch):
        state, _ = deposit_state_analytic(SystemParams(1, 0.7, 20, 20), t, branch)
        assert abs(state.norm2() - 1) <= 1e-12

    def test_outcome_branch_mapping(self):
        assert [Branch.for_outcome(o) for o in OUTCOMES] == [Branch.MINUS, Branch.PLUS, Branch.PLUS, Branch.MINUS]

    @pytest.mark.parametrize("t", [0.5, 1.0, 2.5, 4.0])
    def test_matches_numeric_pipeline(self, t):
        params = SystemParams(1.0, 0.8, 20, 20)
        cutoff = FockCutoff.for_amplitude(0.5 * t)
        psi_i = evolve(eq6_state(cutoff), build_effective_hamiltonian(params, cutoff, local=True), t)
        # dressed frame: (|++,a1,a2> - |--,-a1,-a2>)/sqrt(2)
        a1, a2 = -0.5j * t, -0.4j * t
        eq7 = {
            "++": EcsState(((1 / math.sqrt(2), a1, a2),)),
            "--": EcsState(((-1 / math.sqrt(2), -a1, -a2),)),
        }
        dressed = dressed_from_bare(psi_i)
        assert fidelity(dressed.amplitudes, sectors_to_composite(eq7, cutoff).amplitudes) >= 1 - 1e-8
        lab = to_lab_frame(psi_i, params, t)
        for k, outcome in enumerate(OUTCOMES):
            state, prob = deposit_state_analytic(params, t, Branch.for_outcome(outcome))
            f = lab.field_given_atoms(k // 2, k % 2)
            assert np.vdot(f, f).real == pytest.approx(prob, abs=1e-10)
            assert fidelity(f, state.to_fock(cutoff)) >= 1 - 1e-8


class TestRetrievalState:
    def test_minus_minus_sector(self, default_params):
        t = 1.7
        sectors = retrieval_state_analytic(default_params, t, t, Branch.PLUS)
        pre = 0.5 / math.sqrt(norm_constant(default_params, t, Branch.PLUS))
        (c1, x1, y1), (c2, x2, y2) = sectors["--"].terms
        assert c1 == pytest.approx(pre * cmath.exp(1j * 40 * t)) and (x1, y1) == (0, 0)
        assert c2 == pytest.approx(pre * cmath.exp(-1j * 40 * t))
        assert x2 == pytest.approx(1j * t) and y2 == pytest.approx(1j * t)

    def test_plus_plus_sector(self):
        params = SystemParams(1.0, 0.5, 20, 20)
        t = 1.2
        (_, x1, y1), (c2, x2, y2) = retrieval_state_analytic(params, t, t, Branch.MINUS)["++"].terms
        assert x1 == pytest.approx(-1.2j) and y1 == pytest.approx(-0.6j)
        assert abs(x2) < 1e-15 and abs(y2) < 1e-15

    def test_tprime_locked(self, default_params):
        with pytest.raises(TPrimeMismatch):
            retrieval_state_analytic(default_params, 1.0, 1.5, Branch.PLUS)

    def test_short_time_returns_ground_state(self, default_params):
        t = 1e-9
        sectors = retrieval_state_analytic(default_params, t, t, Branch.PLUS)
        dressed = QubitPairState([sectors[k].amplitude(0, 0) for k in DRESSED_LABELS], DRESSED)
        bare = bare_from_dressed(dressed).amplitudes
        assert abs(bare[0]) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("branch", list(Branch))
    def test_matches_numeric_evolution(self, branch):
        params = SystemParams(1.0, 1.0, 20, 20)
        t = 2.0
        cutoff = FockCutoff.for_amplitude(t)
        ecs, _ = deposit_state_analytic(params, t, branch)
        psi = np.zeros((2, 2, cutoff.nmax, cutoff.nmax), dtype=complex)
        psi[0, 0] = ecs.to_fock(cutoff)
        out = evolve(CompositeState.from_tensor(psi), build_effective_hamiltonian(params, cutoff, local=True), t)
        analytic = bare_from_dressed(sectors_to_composite(retrieval_state_analytic(params, t, t, branch), cutoff))
        assert fidelity(out.amplitudes, analytic.amplitudes) >= 1 - 1e-8
        assert analytic.norm == pytest.approx(1.0, abs=1e-9)


class TestPCoeffs:
    def test_vacuum_large_time(self, default_params):
        t = 6.0
        p = p_coeffs(default_params, t, Branch.PLUS, ProjectionKind.VAC_VAC).amplitudes
        ph = cmath.exp(1j * 40 * t)
        assert abs(p[0] - 1 / ph) < 1e-7 and abs(p[3] - ph) < 1e-7
        assert abs(p[1]) < 1e-7 and abs(p[2]) < 1e-7

    def test_mm_large_time(self, default_params):
        t = 6.0
        p = p_coeffs(default_params, t, Branch.PLUS, ProjectionKind.MM).amplitudes
        assert abs(p[0] - cmath.exp(1j * 40 * t)) < 1e-7
        assert np.max(np.abs(p[1:])) < 1e-7

    def test_m0_large_time(self, default_params):
        p = p_coeffs(default_params, 6.0, Branch.PLUS, ProjectionKind.M0).amplitudes
        assert abs(abs(p[1]) - 1) < 1e-7 and max(abs(p[0]), abs(p[2]), abs(p[3])) < 1e-7

    @pytest.mark.parametrize("tp", [0.25, 0.5, 1.0, 2.0, 4.0])
    @pytest.mark.parametrize("branch", list(Branch))
    def test_closed_forms_match_fock_inner_products(self, tp, branch):
        params = SystemParams(1.0, 1.3, 20, 17)
        cutoff = FockCutoff.for_amplitude(1.3 * tp)
        sectors = retrieval_state_analytic(params, tp, tp, branch)
        scale = 2 * math.sqrt(norm_constant(params, tp, branch))
        for kind in ProjectionKind:
            g1, g2 = kind.amplitudes(params, tp)
            bra = np.outer(coherent_state(g1, cutoff), coherent_state(g2, cutoff))
            numeric = [scale * np.vdot(bra, sectors[label].to_fock(cutoff)) for label in DRESSED_LABELS]
            closed = p_coeffs(params, tp, branch, kind).amplitudes
            assert np.max(np.abs(closed - numeric)) <= 1e-10
            assert np.max(np.abs(closed - p_coeffs_recipe(params, tp, branch, kind).amplitudes)) <= 1e-12

    def test_seven_distinct_projections(self, default_params):
        amps = {kind.amplitudes(default_params, 2.0) for kind in ProjectionKind}
        assert len(amps) == 7


class TestBareAmplitudes:
    def test_single_dressed_sector(self):
        a = bare_amplitudes(QubitPairState([1, 0, 0, 0], DRESSED))
        np.testing.assert_allclose(a.amplitudes, [0.5, 0.5, 0.5, 0.5], atol=1e-15)
        assert a.basis == BARE and a.normalized

    @pytest.mark.parametrize("theta", [0.0, 0.3, 1.1, math.pi / 2, 2.9])
    def test_vacuum_limit_state(self, theta):
        a = bare_amplitudes(QubitPairState([cmath.exp(-1j * theta), 0, 0, cmath.exp(1j * theta)], DRESSED)).amplitudes
        expected = np.array([math.cos(theta), -1j * math.sin(theta), -1j * math.sin(theta), math.cos(theta)])
        assert fidelity(a, expected) == pytest.approx(1.0, abs=1e-14)

    def test_bell_states_from_formula(self):
        def state(ut):
            return bare_amplitudes(QubitPairState([cmath.exp(-1j * ut), 0, 0, cmath.exp(1j * ut)], DRESSED)).amplitudes

        phi_plus = np.array([1, 0, 0, 1]) / math.sqrt(2)
        psi_plus = np.array([0, 1, 1, 0]) / math.sqrt(2)
        for n in range(4):
            assert fidelity(state(n * math.pi), phi_plus) == pytest.approx(1.0, abs=1e-14)
            assert fidelity(state(math.pi / 2 + n * math.pi), psi_plus) == pytest.approx(1.0, abs=1e-14)

    def test_zero_state(self):
        with pytest.raises(ZeroState):
            bare_amplitudes(QubitPairState([0, 0, 0, 0], DRESSED))

    @given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
    def test_isometry(self, p):
        q = QubitPairState(p, DRESSED)
        a = bare_coefficients(q)
        assert abs(np.vdot(a, a).real - 4 * q.norm2()) <= 1e-9 * max(1.0, q.norm2())
        np.testing.assert_allclose(a, 2 * bare_from_dressed(q).amplitudes, atol=1e-12)


def test_vacuum_projection_probability(default_params):
    assert retrieval_probability(default_params, 4.0, Branch.PLUS, ProjectionKind.VAC_VAC) == pytest.approx(0.25, abs=1e-3)
    assert retrieval_probability(default_params, 8.0, Branch.MINUS, ProjectionKind.VAC_VAC) == pytest.approx(0.25, abs=1e-12)
