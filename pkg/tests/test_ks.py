import numpy as np
import pytest

from kstoolkit.errors import (
    BudgetError,
    ClassificationError,
    PreconditionError,
)
from kstoolkit.ks import (
    MeasurementCover,
    OperatorSet,
    classify,
    enumerate_measurements,
    fixture_peres24,
    lift,
    marking_violations,
    parity_obstruction,
    search_marking,
    search_marking_detailed,
    weak_from_projective,
)
from kstoolkit.linalg import hs_inner, is_projector

from _oracles import brute_consistent_assignments, brute_identity_subsets, brute_marking_exists


def basis_set(dim):
    eye = np.eye(dim, dtype=complex)
    return OperatorSet.from_kets([eye[i] for i in range(dim)])


def two_bases_c2():
    # standard basis plus the diagonal basis: not a KS-style set
    kets = [
        [1, 0],
        [0, 1],
        [1 / np.sqrt(2), 1 / np.sqrt(2)],
        [1 / np.sqrt(2), -1 / np.sqrt(2)],
    ]
    return OperatorSet.from_kets(kets)


class TestOperatorSet:
    def test_duplicate_rejected(self):
        eye = np.eye(2, dtype=complex)
        with pytest.raises(PreconditionError):
            OperatorSet.from_kets([eye[0], eye[0]])

    def test_zero_rejected(self):
        with pytest.raises(PreconditionError):
            OperatorSet.from_projectors([np.zeros((2, 2))])

    def test_psd_above_identity_rejected(self):
        with pytest.raises(PreconditionError):
            OperatorSet.from_psd([1.5 * np.eye(2)])

    def test_non_projector_rejected(self):
        with pytest.raises(PreconditionError):
            OperatorSet.from_projectors([np.diag([1.0, 0.5])])

    def test_vectors_kind_stores_kets(self):
        s = basis_set(3)
        assert s.kind == "vectors"
        assert len(s.kets) == 3


class TestEnumerateMeasurements:
    def test_standard_basis_dim2(self):
        cover = enumerate_measurements(basis_set(2))
        assert cover.subsets == ((0, 1),)

    def test_identity_singleton(self):
        s = OperatorSet.from_projectors([np.eye(2)])
        cover = enumerate_measurements(s)
        assert cover.subsets == ((0,),)

    def test_cabello_matches_brute_force(self, cabello18, cabello_cover):
        brute = brute_identity_subsets(list(cabello18.matrices), cabello18.dim)
        assert sorted(cabello_cover.subsets) == sorted(brute)
        assert len(cabello_cover) == 9
        counts = [0] * 18
        for sub in cabello_cover.subsets:
            assert len(sub) == 4
            for e in sub:
                counts[e] += 1
        assert counts == [2] * 18

    def test_peres_matches_brute_force(self):
        s = fixture_peres24()
        cover = enumerate_measurements(s)
        brute = brute_identity_subsets(list(s.matrices), s.dim)
        assert sorted(cover.subsets) == sorted(brute)
        assert len(cover) == 24

    def test_psd_povm_cover(self):
        # three-outcome trine POVM in dimension 2
        mats = []
        for k in range(3):
            v = np.array([np.cos(k * 2 * np.pi / 3), np.sin(k * 2 * np.pi / 3)])
            mats.append((2 / 3) * np.outer(v, v).astype(complex))
        s = OperatorSet.from_psd(mats)
        cover = enumerate_measurements(s)
        assert cover.subsets == ((0, 1, 2),)

    def test_cap(self, cabello18):
        with pytest.raises(BudgetError):
            enumerate_measurements(cabello18, cap=10)

    def test_lexicographic_order(self, cabello_cover):
        assert list(cabello_cover.subsets) == sorted(cabello_cover.subsets)


class TestSearchMarking:
    def test_single_basis_marks_first_element(self):
        s = basis_set(4)
        cover = enumerate_measurements(s)
        assignment = search_marking(s, cover, forbid="orthogonal_pair")
        assert assignment.values == (1, 0, 0, 0)

    def test_cabello_has_no_marking_at_all(self, cabello18, cabello_cover):
        assert search_marking(cabello18, cabello_cover, forbid="none") is None
        assert brute_consistent_assignments(cabello_cover.subsets, limit=1) == []

    def test_cabello_no_orthogonality_avoiding_marking(self, cabello18, cabello_cover):
        assert search_marking(cabello18, cabello_cover, forbid="orthogonal_pair") is None

    def test_returned_assignment_is_validated(self):
        s = two_bases_c2()
        cover = enumerate_measurements(s)
        assignment = search_marking(s, cover, forbid="none")
        assert assignment is not None
        assert marking_violations(s, cover, assignment, forbid="none") == []

    def test_against_exhaustive_small_sets(self):
        # random projective sets up to 12 elements: agreement with the 2^n scan
        rng = np.random.default_rng(5)
        for trial in range(30):
            dim = int(rng.integers(2, 5))
            eye = np.eye(dim, dtype=complex)
            kets = [eye[i] for i in range(dim)]
            # add rotated bases to create overlap structure (up to 12 rays)
            for _ in range(int(rng.integers(1, 3))):
                theta = rng.uniform(0, np.pi)
                c, sn = np.cos(theta), np.sin(theta)
                rot = np.eye(dim, dtype=complex)
                axes = rng.choice(dim, size=2, replace=False)
                rot[np.ix_(axes, axes)] = [[c, -sn], [sn, c]]
                kets += [rot @ k for k in kets[:dim]]
            try:
                s = OperatorSet.from_kets(kets[:12])
            except PreconditionError:
                continue  # a rotation collapsed onto existing rays
            cover = enumerate_measurements(s)
            if not cover.subsets:
                continue
            for forbid in ("none", "orthogonal_pair"):
                pairs = []
                if forbid == "orthogonal_pair":
                    mats = s.matrices
                    pairs = [
                        (i, j)
                        for i in range(len(s))
                        for j in range(i + 1, len(s))
                        if abs(hs_inner(mats[i], mats[j])) < 1e-9
                    ]
                brute = brute_marking_exists(len(s), cover.subsets, pairs)
                mine = search_marking(s, cover, forbid=forbid)
                assert (mine is None) == (brute is None)

    def test_nodes_and_space_recorded(self, cabello18, cabello_cover):
        assignment, record = search_marking_detailed(cabello18, cabello_cover, "none")
        assert assignment is None
        assert record.search_space_size == 4**9
        assert record.nodes_visited > 0
        assert record.subset_count == 9


class TestClassify:
    def test_single_basis_not_ks(self):
        verdict = classify(basis_set(4))
        assert verdict.classification == "not_ks"
        assert verdict.marking is not None
        assert verdict.certificate()["marking"] == [1, 0, 0, 0]

    def test_two_bases_not_ks(self):
        verdict = classify(two_bases_c2())
        assert verdict.classification == "not_ks"

    def test_cabello(self, cabello18):
        verdict = classify(cabello18)
        assert verdict.classification == "weak_or_projective_ks"
        assert verdict.exhaustion.search_space_size == 4**9

    def test_lift_preserves_classification(self, cabello18):
        for m in (1, 2, 3):
            assert classify(lift(cabello18, m)).classification == "weak_or_projective_ks"
        for m in (1, 2):
            assert classify(lift(basis_set(2), m)).classification == "not_ks"
            assert classify(lift(fixture_peres24(), m)).classification == "weak_or_projective_ks"

    def test_psd_kind_uses_subidentity_forbid(self, cabello18):
        # the same projectors viewed as POVM elements: orthogonal projector
        # pairs satisfy E + E' <= I, so the generalized verdict must agree
        s = OperatorSet.from_psd(list(cabello18.matrices), labels=cabello18.labels)
        verdict = classify(s)
        assert verdict.classification == "generalized_ks"
        assert verdict.exhaustion.forbid == "subidentity_pair"

    def test_psd_not_ks(self):
        mats = []
        for k in range(3):
            v = np.array([np.cos(k * 2 * np.pi / 3), np.sin(k * 2 * np.pi / 3)])
            mats.append((2 / 3) * np.outer(v, v).astype(complex))
        verdict = classify(OperatorSet.from_psd(mats))
        assert verdict.classification == "not_ks"

    def test_synthetic_psd_covers_match_brute_force(self):
        # random two-outcome POVM families {E, I-E}: classify must agree with
        # the exhaustive 2^n scan under the pairwise below-identity predicate
        from kstoolkit.linalg import psd_leq

        rng = np.random.default_rng(67)
        eye = np.eye(2, dtype=complex)
        for _ in range(10):
            mats = []
            for _ in range(3):
                raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                herm = raw @ raw.conj().T
                e = herm / (np.trace(herm).real + rng.uniform(0.5, 2.0))
                mats.extend([e, eye - e])
            try:
                s = OperatorSet.from_psd(mats)
            except PreconditionError:
                continue  # a draw collided with its complement
            cover = enumerate_measurements(s)
            if not cover.subsets:
                continue
            pairs = [
                (i, j)
                for i in range(len(s))
                for j in range(i + 1, len(s))
                if psd_leq(s.matrices[i] + s.matrices[j], eye)
            ]
            brute = brute_marking_exists(len(s), cover.subsets, pairs)
            verdict = classify(s)
            assert (verdict.classification == "not_ks") == (brute is not None)

    def test_no_measurements_is_an_error(self):
        s = OperatorSet.from_kets([[1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)]])
        with pytest.raises(ClassificationError):
            classify(s)


class TestWeakFromProjective:
    def test_rank_one_returns_same_rays(self, cabello18):
        out = weak_from_projective(cabello18)
        assert out.kind == "vectors"
        assert len(out) == len(cabello18)
        for (_, p), (_, q) in zip(out.elements, cabello18.elements):
            assert np.max(np.abs(p - q)) < 1e-9

    def test_identity_input_rejected(self):
        s = OperatorSet.from_projectors([np.eye(2)])
        with pytest.raises(PreconditionError):
            weak_from_projective(s)

    def test_lifted_cabello(self, cabello18):
        lifted = lift(cabello18, 2)
        out = weak_from_projective(lifted)
        assert len(out) == 36
        assert out.dim == 8
        assert classify(out).classification == "weak_or_projective_ks"


class TestLift:
    def test_identity_factor(self, cabello18):
        assert lift(cabello18, 1) is cabello18

    def test_basis_lift(self):
        out = lift(basis_set(2), 2)
        assert out.dim == 4
        for _, mat in out.elements:
            assert is_projector(mat)
            assert np.trace(mat).real == pytest.approx(2)
        assert enumerate_measurements(out).subsets == ((0, 1),)

    def test_orthogonality_scaling(self, cabello18):
        lifted = lift(cabello18, 3)
        a0 = cabello18.matrices[0]
        a1 = cabello18.matrices[1]
        b0, b1 = lifted.matrices[0], lifted.matrices[1]
        assert hs_inner(b0, b1) == pytest.approx(3 * hs_inner(a0, a1))

    def test_invalid_factor(self, cabello18):
        with pytest.raises(PreconditionError):
            lift(cabello18, 0)


class TestParityObstruction:
    def test_cabello_cover_is_obstructed(self, cabello18, cabello_cover):
        assert parity_obstruction(cabello_cover, len(cabello18))
        assert search_marking(cabello18, cabello_cover, forbid="none") is None

    def test_even_cover_not_obstructed(self):
        cover = MeasurementCover(subsets=((0, 1), (0, 1, 2)))
        assert not parity_obstruction(cover, 3)

    def test_prediction_never_contradicts_search(self):
        # single basis: every element appears once, so no obstruction
        s = basis_set(3)
        cover = enumerate_measurements(s)
        assert not parity_obstruction(cover, len(s))
        assert search_marking(s, cover, forbid="none") is not None


class TestFixtures:
    def test_cabello_structure(self, cabello18):
        assert len(cabello18) == 18
        assert cabello18.dim == 4
        for _, mat in cabello18.elements:
            assert is_projector(mat)

    def test_peres_structure(self):
        s = fixture_peres24()
        assert len(s) == 24
        assert classify(s).classification == "weak_or_projective_ks"


class TestMeasurementCover:
    def test_duplicate_subsets_rejected(self):
        with pytest.raises(PreconditionError):
            MeasurementCover(subsets=((0, 1), (1, 0)))

    def test_validate_against_set(self, cabello18, cabello_cover):
        cabello_cover.validate(cabello18)
        bad = MeasurementCover(subsets=((0, 1),))
        with pytest.raises(PreconditionError):
            bad.validate(cabello18)
