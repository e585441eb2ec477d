import numpy as np
import pytest

from conftest import E11, E12, WORKED_B, WORKED_S, mat
from doubles import AllHermitianCone, ZeroedCornerCone
from matorder.algebra import doubling_embed, generate_algebra
from matorder.cones import (
    SimilarityCone,
    StandardCone,
    audit_algebraically_admissible,
    audit_matrix_ordered,
    audit_star_admissible,
    compress,
    compress_via_conjugations,
    estimate_main_constants,
    replay_witness,
)
from matorder.errors import DimensionMismatch, MembershipError, SourceNotStarClosed


def test_member_unit_and_indefinite(std_m2):
    assert std_m2.member(1, np.eye(2, dtype=complex))
    assert not std_m2.member(1, np.diag([1.0, -1.0]).astype(complex))


def test_member_raises_outside_algebra(span_i_e11):
    cone = StandardCone(span_i_e11)
    with pytest.raises(MembershipError):
        cone.member(1, E12)


def test_similarity_member_worked_instance(worked_sim_cone):
    # S b S^-1 = E_11, which is PSD.
    assert worked_sim_cone.member(1, WORKED_B)
    assert not worked_sim_cone.member(1, -WORKED_B)


def test_similarity_member_matches_straightened(worked_sim_cone):
    rng = np.random.default_rng(0)
    std = StandardCone(worked_sim_cone.straight_algebra)
    for n in (1, 2):
        for _ in range(10):
            c = worked_sim_cone.sample(n, rng)
            assert worked_sim_cone.member(n, c)
            assert std.member(n, worked_sim_cone.straighten(n, c))
            h = worked_sim_cone.sample_span(n, rng)
            assert worked_sim_cone.member(n, h) == std.member(
                n, worked_sim_cone.straighten(n, h))


@pytest.mark.parametrize("fixture", ["std_m2", "std_m3", "worked_sim_cone"])
def test_algebraically_admissible_passes(fixture, request):
    cone = request.getfixturevalue(fixture)
    report = audit_algebraically_admissible(cone, 1, samples=25, seed=1)
    assert report.passed, [c for c in report.checks if c.verdict != "pass"]


def test_algebraically_admissible_needs_star_closed(worked_algebra):
    cone = StandardCone(worked_algebra)
    with pytest.raises(SourceNotStarClosed):
        audit_algebraically_admissible(cone, 1, samples=4, seed=0)


@pytest.mark.parametrize("fixture", ["std_m2", "std_m3", "worked_sim_cone"])
def test_matrix_ordered_passes(fixture, request):
    cone = request.getfixturevalue(fixture)
    report = audit_matrix_ordered(cone, levels=(1, 2), samples=10, seed=2)
    assert report.passed, [c for c in report.checks if c.verdict != "pass"]


def test_row_selection_embedding(std_m2):
    # B = (I 0) in M_{1x2} embeds C_1 into C_2.
    rng = np.random.default_rng(3)
    sel = np.zeros((2, 4), dtype=complex)
    sel[:2, :2] = np.eye(2)
    for _ in range(5):
        c = std_m2.sample(1, rng)
        embedded = sel.conj().T @ c @ sel
        assert std_m2.member(2, embedded)


@pytest.mark.parametrize("fixture", ["std_m2", "std_m3", "worked_sim_cone"])
def test_star_admissible_passes(fixture, request):
    cone = request.getfixturevalue(fixture)
    report = audit_star_admissible(cone, levels=(1, 2), samples=25, seed=3)
    assert report.passed, [c for c in report.checks if c.verdict != "pass"]
    assert report.constants["r4"].value <= 1.0 + 1e-6
    assert report.constants["K"].value <= 1.0 + 1e-6


def test_standard_r4_tight_witness(std_m2):
    report = audit_star_admissible(std_m2, levels=(1,), samples=40, seed=4)
    assert report.constants["r4"].value == pytest.approx(1.0, abs=1e-6)


def test_similarity_K_finite_and_reasonable(worked_sim_cone):
    report = audit_star_admissible(worked_sim_cone, levels=(1, 2), samples=40, seed=5)
    k = report.constants["K"].value
    assert np.isfinite(k)
    assert k >= 1.0 - 1e-12  # the pair (a, 0) realizes ratio 1
    assert k <= 10.0  # conjugation-bounded; recorded, not pinned


def test_matrix_ordered_three_levels(std_m2):
    report = audit_matrix_ordered(std_m2, levels=(1, 2, 4), samples=6, seed=21)
    assert report.passed


def test_all_hermitian_fails_classical_pointedness(m2_full):
    cone = AllHermitianCone(m2_full)
    report = audit_algebraically_admissible(cone, 1, samples=8, seed=22)
    failed = {c.axiom: c for c in report.failures()}
    check = failed["pointedness-level-1"]
    # The reported lineality direction is the unit itself.
    np.testing.assert_allclose(check.witness.members[0], np.eye(2), atol=1e-12)
    assert replay_witness(cone, check.witness)


def test_main_constants_standard(std_m2):
    r1, alpha = estimate_main_constants(std_m2, levels=(1, 2), samples=40, seed=6)
    # Complement pairs sit on the oracle's fuzzy boundary, so the estimate
    # can dip below the exact bound by the PSD slack.
    assert r1.value >= 1.0 - 1e-7
    assert alpha.value == pytest.approx(1.0, abs=1e-6)
    assert len(r1.witness) == 2 and len(alpha.witness) == 2


def test_pullback_r1_decays_with_refinement():
    from matorder.case_studies import FunctionPullbackCone

    estimates = []
    for m, mf in ((32, 4), (128, 16)):
        cone = FunctionPullbackCone(np.linspace(0, 1, m), max_frequency=mf)
        r1, _ = estimate_main_constants(cone, levels=(1,), samples=30, seed=5)
        estimates.append(r1.value)
    assert estimates[1] < 0.5 * estimates[0]


def test_all_hermitian_cone_fails_pointedness(m2_full):
    cone = AllHermitianCone(m2_full)
    report = audit_star_admissible(cone, levels=(1,), samples=10, seed=7)
    failed = {c.axiom for c in report.failures()}
    assert "pointedness-level-1" in failed
    for check in report.failures():
        if check.witness is not None:
            assert replay_witness(cone, check.witness)


def test_zeroed_corner_cone_fails_conjugation(m2_full):
    cone = ZeroedCornerCone(m2_full)
    report = audit_matrix_ordered(cone, levels=(1, 2), samples=10, seed=8)
    failed = {c.axiom for c in report.failures()}
    assert "scalar-rectangular-conjugation" in failed or \
        "algebra-rectangular-conjugation" in failed
    for check in report.failures():
        if check.witness is not None:
            assert replay_witness(cone, check.witness)


def test_compress_fixed_point_of_embedded():
    rng = np.random.default_rng(9)
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    x = doubling_embed(b)
    np.testing.assert_allclose(compress(x, 0, 1, ambient_dim=2), x, atol=1e-12)


def test_compress_picks_first_block():
    x = np.zeros((4, 4), dtype=complex)
    x[:2, :2] = E11
    x[2:, 2:] = mat([[5, 6], [7, 8]])
    x[:2, 2:] = mat([[1, 2], [3, 4]])
    out = compress(x, 0, 1, ambient_dim=2)
    np.testing.assert_allclose(out, np.kron(np.eye(2), E11), atol=1e-12)


def test_compress_requires_compatible_dims():
    with pytest.raises(DimensionMismatch):
        compress(np.eye(6, dtype=complex), 0, 2)
    with pytest.raises(DimensionMismatch):
        compress(np.eye(4, dtype=complex), 1, 0)
    with pytest.raises(DimensionMismatch):
        compress(np.eye(8, dtype=complex), 0, 1, ambient_dim=3)


def test_compress_matches_conjugation_sum():
    rng = np.random.default_rng(10)
    for (n, m, amb) in [(0, 1, 2), (1, 2, 2), (0, 2, 1)]:
        size = 2 ** m * amb
        x = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        np.testing.assert_allclose(
            compress(x, n, m, ambient_dim=amb),
            compress_via_conjugations(x, n, m, ambient_dim=amb),
            atol=1e-12,
        )


def test_compress_contraction_and_cone_stability(std_m2):
    rng = np.random.default_rng(11)
    for _ in range(25):
        c = std_m2.sample(2, rng)
        out = compress(c, 0, 1, ambient_dim=2)
        assert np.linalg.norm(out, 2) <= np.linalg.norm(c, 2) + 1e-10
        assert std_m2.member(2, out)


def test_compress_commutes_with_doubling():
    rng = np.random.default_rng(12)
    for (n, m, amb) in [(0, 1, 2), (1, 2, 2)]:
        size = 2 ** m * amb
        x = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        lhs = compress(doubling_embed(x), n, m + 1, ambient_dim=amb)
        rhs = doubling_embed(compress(x, n, m, ambient_dim=amb))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_pointedness_exact_for_similarity(planted_sim_cone):
    assert planted_sim_cone.lineality_basis(1) == []
    assert planted_sim_cone.lineality_basis(2) == []


class _ComplexLineCone(StandardCone):
    """Fake oracle whose claimed span is a complex line: both span axioms
    fail, exercising the span-deficiency and span-overlap witnesses."""

    def span_basis(self, n):
        a = np.zeros((2 * n, 2 * n), dtype=complex)
        a[0, 1] = 1.0
        return np.stack([a, 1j * a])

    def member(self, n, x):
        return True


def test_span_failures_carry_replayable_witnesses(m2_full):
    cone = _ComplexLineCone(m2_full)
    report = audit_star_admissible(cone, levels=(1,), samples=4, seed=0)
    failed = {c.axiom: c for c in report.failures()}
    dec = failed["span-decomposition-2i-level-1"]
    ind = failed["real-imag-independence-2iii-level-1"]
    assert dec.witness is not None and dec.witness.kind == "span-deficiency"
    assert ind.witness is not None and ind.witness.kind == "span-overlap"
    assert replay_witness(cone, dec.witness)
    assert replay_witness(cone, ind.witness)
