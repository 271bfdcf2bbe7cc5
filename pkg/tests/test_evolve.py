"""
Unit tests for the SPEA2 engine.
"""

import logging

import numpy as np
import pytest
from pydantic import ValidationError as SchemaError
from scipy import stats

from tools.evolve import (
    Evaluation,
    Individual,
    ObjectiveOrientation,
    Sense,
    SpeaParams,
    assign_fitness,
    binary_tournament,
    dominates,
    environmental_selection,
    nondominated,
    run_spea2,
    truncate,
    vary,
)
from utils.validators import ValidationError

MIN2 = ObjectiveOrientation.minimize_all(2)


def _individuals(points):
    return [Individual(genome=np.zeros(2), objectives=np.asarray(p, dtype=float)) for p in points]


def _zdt_like(genome, generation):
    """Two conflicting objectives on [0, 400]^2."""
    x = genome / 400.0
    return np.array([x[0], 1.0 + x[1] - np.sqrt(x[0])])


def _mutually_nondominated(individuals, orient):
    for a in individuals:
        for b in individuals:
            if a is not b and dominates(a.objectives, b.objectives, orient):
                return False
    return True


class TestDominates:
    """Tests for Pareto dominance."""

    def test_equal_vectors(self):
        """Test a vector never dominates itself."""
        assert not dominates([1, 2, 3], [1, 2, 3])

    def test_strict_in_one(self):
        """Test (1,2,3) dominates (2,2,3) when minimizing."""
        assert dominates([1, 2, 3], [2, 2, 3])
        assert not dominates([2, 2, 3], [1, 2, 3])

    def test_maximized_fill_rate(self):
        """Test higher fill dominates under (min, max, min)."""
        orient = ObjectiveOrientation.default()
        assert dominates([50, 0.95, 10], [50, 0.90, 10], orient)
        assert not dominates([50, 0.90, 10], [50, 0.95, 10], orient)

    def test_incomparable(self):
        """Test trade-offs are incomparable."""
        assert not dominates([1, 3], [2, 2])
        assert not dominates([2, 2], [1, 3])

    def test_dimension_mismatch(self):
        """Test mismatched lengths are rejected."""
        with pytest.raises(ValidationError):
            dominates([1, 2], [1, 2, 3])

    def test_non_finite(self):
        """Test NaN objectives are rejected."""
        with pytest.raises(ValidationError):
            dominates([1, np.nan], [1, 2])


class TestOrientation:
    """Tests for objective orientation."""

    def test_default_senses(self):
        """Test cost/fill/lead default orientation."""
        assert ObjectiveOrientation.default().senses == (Sense.MINIMIZE, Sense.MAXIMIZE, Sense.MINIMIZE)

    def test_subset(self):
        """Test selecting the fill and lead senses."""
        assert ObjectiveOrientation.default().subset([1, 2]).senses == (Sense.MAXIMIZE, Sense.MINIMIZE)

    def test_to_minimization(self):
        """Test maximized columns are negated."""
        result = ObjectiveOrientation.default().to_minimization([[1.0, 0.5, 2.0]])
        np.testing.assert_array_equal(result, [[1.0, -0.5, 2.0]])


class TestSpeaParams:
    """Tests for parameter validation."""

    def test_defaults(self):
        """Test the reference defaults."""
        params = SpeaParams()
        assert (params.population_size, params.archive_size, params.generations) == (200, 100, 15)
        assert params.crossover_rate == 0.85 and params.mutation_rate == 0.05
        assert params.s_max == 400.0
        assert params.k == 17

    def test_invalid_values(self):
        """Test out-of-range parameters are rejected."""
        with pytest.raises(SchemaError):
            SpeaParams(archive_size=0)
        with pytest.raises(SchemaError):
            SpeaParams(crossover_rate=1.5)
        with pytest.raises(SchemaError):
            SpeaParams(s_max=0)
        with pytest.raises(SchemaError):
            SpeaParams(unknown=1)


class TestAssignFitness:
    """Tests for strength, raw fitness and density."""

    def test_single_individual(self):
        """Test a lone individual is nondominated."""
        (ind,) = assign_fitness(_individuals([(1, 1)]), MIN2)
        assert ind.raw_fitness == 0.0
        assert ind.fitness < 1.0
        assert ind.density == 0.5

    def test_chain(self):
        """Test strengths (2,1,0) give raw fitness (0,2,3)."""
        inds = assign_fitness(_individuals([(0, 0), (1, 1), (2, 2)]), MIN2)
        assert [ind.raw_fitness for ind in inds] == [0.0, 2.0, 3.0]

    def test_nondominated_set(self):
        """Test mutually nondominated points all have fitness below 1."""
        inds = assign_fitness(_individuals([(0, 3), (1, 2), (2, 1), (3, 0)]), MIN2)
        assert all(ind.raw_fitness == 0.0 for ind in inds)
        assert all(0.0 < ind.density <= 0.5 for ind in inds)
        assert all(ind.fitness < 1.0 for ind in inds)

    def test_fitness_below_one_iff_nondominated(self):
        """Test the fitness threshold identifies the nondominated members."""
        rng = np.random.default_rng(1)
        orient = ObjectiveOrientation.default()
        for _ in range(20):
            inds = [
                Individual(genome=np.zeros(2), objectives=np.array([rng.uniform(0, 100), rng.uniform(0, 1), rng.uniform(0, 50)]))
                for _ in range(50)
            ]
            assign_fitness(inds, orient, k=5)
            for ind in inds:
                dominated = any(dominates(o.objectives, ind.objectives, orient) for o in inds if o is not ind)
                assert (ind.fitness < 1.0) == (not dominated)


class TestTruncate:
    """Tests for nearest-neighbor archive truncation."""

    def test_no_op_at_capacity(self):
        """Test an archive at capacity is unchanged."""
        inds = _individuals([(0, 2), (1, 1), (2, 0)])
        assert truncate(inds, 3, MIN2) == inds

    def test_collinear_middle_removed(self):
        """Test the middle of three equally spaced points goes first."""
        inds = _individuals([(0, 2), (1, 1), (2, 0)])
        kept = truncate(inds, 2, MIN2)
        assert inds[1] not in kept
        assert len(kept) == 2

    def test_duplicate_removed_first(self):
        """Test duplicates have zero distance and are removed first."""
        inds = _individuals([(0, 3), (1, 2), (1, 2), (3, 0)])
        kept = truncate(inds, 3, MIN2)
        objectives = [tuple(ind.objectives) for ind in kept]
        assert objectives.count((1.0, 2.0)) == 1

    def test_removes_lexicographic_minimum(self):
        """Test each removal takes the lexicographically smallest sorted distance row."""
        rng = np.random.default_rng(5)
        for _ in range(30):
            x = np.sort(rng.uniform(0, 1, 12))
            points = np.column_stack([x, 1 - x ** rng.uniform(0.3, 3)])
            inds = _individuals(points)
            kept = truncate(inds, 11, MIN2)
            (removed,) = [ind for ind in inds if ind not in kept]

            lo, hi = points.min(axis=0), points.max(axis=0)
            F = (points - lo) / (hi - lo)
            rows = []
            for i in range(len(F)):
                d = sorted(np.linalg.norm(F[i] - F[j]) for j in range(len(F)) if j != i)
                rows.append((tuple(d), i))
            assert inds[min(rows)[1]] is removed


class TestEnvironmentalSelection:
    """Tests for archive update."""

    def test_underfull_filled_with_best_dominated(self):
        """Test 3 nondominated points plus the best dominated fill."""
        points = [(0, 2), (1, 1), (2, 0), (3, 3), (5, 5), (4, 4)]
        inds = assign_fitness(_individuals(points), MIN2)
        archive = environmental_selection(inds, 5, MIN2)
        assert len(archive) == 5
        assert all(ind in archive for ind in inds[:3])
        assert inds[4] not in archive

    def test_archive_larger_than_population(self):
        """Test everything survives when capacity exceeds the set."""
        inds = assign_fitness(_individuals([(0, 2), (1, 1), (2, 2)]), MIN2)
        assert len(environmental_selection(inds, 100, MIN2)) == 3

    def test_overfull_truncated(self):
        """Test 150 nondominated points shrink to exactly 100."""
        x = np.linspace(0, 1, 150)
        inds = assign_fitness(_individuals(np.column_stack([x, 1 - x])), MIN2)
        archive = environmental_selection(inds, 100, MIN2)
        assert len(archive) == 100
        assert all(ind.fitness < 1.0 for ind in archive)

    def test_truncation_scaled_over_combined_set(self):
        """Test a dominated outlier widens the scale truncation measures distances on."""
        front = [(0.176, 0.48), (0.3, 0.365), (0.423, 0.277), (0.541, 0.206), (0.73, 0.112), (0.863, 0.054)]
        inds = assign_fitness(_individuals(front + [(1.5, 8.0)]), MIN2)
        archive = environmental_selection(inds, 5, MIN2)
        assert len(archive) == 5
        (removed,) = [ind for ind in inds[:6] if ind not in archive]
        assert removed is inds[2]

        # on the front's own range the x gaps no longer dominate
        kept = truncate(inds[:6], 5, MIN2)
        assert inds[4] not in kept

    def test_truncation_matches_combined_set_rule(self):
        """Test the removed member is the lexicographic minimum under combined-set scaling."""
        rng = np.random.default_rng(11)
        for _ in range(40):
            x = np.sort(rng.uniform(0, 1, 6))
            front = np.column_stack([x, 1 - x ** rng.uniform(0.3, 3)])
            outlier = rng.uniform([1.2, 2.0], [2.0, 10.0])
            points = np.vstack([front, outlier])
            inds = assign_fitness(_individuals(points), MIN2)
            archive = environmental_selection(inds, 5, MIN2)
            (removed,) = [ind for ind in inds[:6] if ind not in archive]

            lo, hi = points.min(axis=0), points.max(axis=0)
            F = (front - lo) / (hi - lo)
            rows = []
            for i in range(len(F)):
                d = sorted(np.linalg.norm(F[i] - F[j]) for j in range(len(F)) if j != i)
                rows.append((tuple(d), i))
            assert inds[min(rows)[1]] is removed


class TestBinaryTournament:
    """Tests for mating selection."""

    def test_single_member(self):
        """Test an archive of one always returns that member."""
        (ind,) = _individuals([(1, 1)])
        assert binary_tournament([ind], np.random.default_rng(0)) is ind

    def test_lower_fitness_wins(self):
        """Test 0.3 beats 2.7 whenever both are drawn."""
        a, b = _individuals([(0, 0), (1, 1)])
        a.fitness, b.fitness = 0.3, 2.7
        rng = np.random.default_rng(1)
        picks = [binary_tournament([a, b], rng) for _ in range(1000)]
        # b only wins when drawn twice
        assert picks.count(b) == pytest.approx(250, abs=60)

    def test_ties_are_fair(self):
        """Test equal fitness gives each member probability 0.5."""
        a, b = _individuals([(0, 1), (1, 0)])
        a.fitness = b.fitness = 0.4
        rng = np.random.default_rng(2)
        picks = [binary_tournament([a, b], rng) is a for _ in range(10_000)]
        wins = sum(picks)
        _, p_value = stats.chisquare([wins, 10_000 - wins])
        assert p_value > 0.001

    def test_empty_archive(self):
        """Test an empty archive is rejected."""
        with pytest.raises(ValidationError):
            binary_tournament([], np.random.default_rng(0))


class TestVary:
    """Tests for crossover and mutation."""

    def test_identity_without_operators(self):
        """Test zero rates return copies of the parents."""
        params = SpeaParams(crossover_rate=0.0, mutation_rate=0.0)
        p1, p2 = np.array([10.0, 300.0]), np.array([200.0, 5.0])
        c1, c2 = vary((p1, p2), params, np.random.default_rng(0))
        np.testing.assert_array_equal(c1, p1)
        np.testing.assert_array_equal(c2, p2)

    def test_identical_parents_without_mutation(self):
        """Test crossover of identical parents reproduces the parent."""
        params = SpeaParams(crossover_rate=1.0, mutation_rate=0.0)
        p = np.array([123.4, 56.7])
        rng = np.random.default_rng(1)
        for _ in range(100):
            c1, c2 = vary((p, p.copy()), params, rng)
            np.testing.assert_array_equal(c1, p)
            np.testing.assert_array_equal(c2, p)

    def test_bounds_respected(self):
        """Test 10,000 offspring from parents at the bounds stay in [0, S_max]."""
        params = SpeaParams(crossover_rate=1.0, mutation_rate=1.0)
        rng = np.random.default_rng(2)
        p1, p2 = np.array([0.0, 400.0]), np.array([400.0, 0.0])
        children = np.array([c for _ in range(5000) for c in vary((p1, p2), params, rng)])
        assert children.shape == (10_000, 2)
        assert children.min() >= 0.0 and children.max() <= 400.0

    def test_crossover_changes_genes(self):
        """Test crossover produces new values between distinct parents."""
        params = SpeaParams(crossover_rate=1.0, mutation_rate=0.0)
        c1, _ = vary((np.array([100.0, 100.0]), np.array([200.0, 300.0])), params, np.random.default_rng(3))
        assert not np.array_equal(c1, [100.0, 100.0])


class TestRunSpea2:
    """Tests for the main loop."""

    def test_generation_progress_fields(self, caplog):
        """Test each generation logs its counters as context fields."""
        params = SpeaParams(population_size=10, archive_size=4, generations=3, seed=2)
        with caplog.at_level(logging.INFO, logger="tools.evolve"):
            run_spea2(params, _zdt_like, MIN2, dimension=2)
        records = [r for r in caplog.records if r.getMessage().startswith("generation ")]
        assert [r.extra_fields["generation"] for r in records] == [0, 1, 2]
        assert [r.extra_fields["evaluations"] for r in records] == [10, 20, 30]
        assert all(r.extra_fields["archive"] == 4 for r in records)

    def test_structural_invariants(self):
        """Test archive bounds, nondominated front and evaluation count."""
        params = SpeaParams(population_size=30, archive_size=12, generations=6, seed=3)
        result = run_spea2(params, _zdt_like, MIN2, dimension=2)
        assert result.evaluations == 30 * 6
        assert len(result.snapshots) == 6
        assert all(size <= 12 for size in result.archive_sizes)
        assert len(result.archive) <= 12
        assert _mutually_nondominated(result.front, MIN2)
        assert all(_mutually_nondominated(snap, MIN2) for snap in result.snapshots)
        assert len(result.explored) == result.evaluations

    def test_single_generation(self):
        """Test T=1 keeps the nondominated initial individuals."""
        params = SpeaParams(population_size=20, archive_size=50, generations=1, seed=4)
        result = run_spea2(params, _zdt_like, MIN2, dimension=2)
        expected = nondominated(result.explored, MIN2)
        assert {id(i) for i in result.front} == {id(i) for i in expected}
        assert len(result.archive) == 20

    def test_same_seed_identical(self):
        """Test identical seeds give bit-identical archives."""
        params = SpeaParams(population_size=24, archive_size=10, generations=5, seed=9)
        a = run_spea2(params, _zdt_like, MIN2, dimension=2)
        b = run_spea2(params, _zdt_like, MIN2, dimension=2)
        np.testing.assert_array_equal([i.genome for i in a.archive], [i.genome for i in b.archive])
        np.testing.assert_array_equal([i.objectives for i in a.archive], [i.objectives for i in b.archive])

    def test_odd_population(self):
        """Test odd population sizes still evaluate N_P per generation."""
        params = SpeaParams(population_size=7, archive_size=4, generations=3, seed=1)
        result = run_spea2(params, _zdt_like, MIN2, dimension=2)
        assert result.evaluations == 21

    def test_payload_kept(self):
        """Test Evaluation payloads reach the individuals."""
        def evaluator(genome, generation):
            return Evaluation(objectives=_zdt_like(genome, generation), payload={"t": generation})

        params = SpeaParams(population_size=10, archive_size=5, generations=2, seed=1)
        result = run_spea2(params, evaluator, MIN2, dimension=2)
        assert all(ind.payload["t"] == ind.generation for ind in result.explored)

    def test_evaluator_errors_propagate(self):
        """Test evaluator exceptions escape the loop."""
        def broken(genome, generation):
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError, match="boom"):
            run_spea2(SpeaParams(population_size=4, archive_size=2, generations=2), broken, MIN2, dimension=2)

    def test_bad_objective_vector(self):
        """Test evaluators returning the wrong number of objectives are rejected."""
        with pytest.raises(ValidationError):
            run_spea2(SpeaParams(population_size=4, archive_size=2, generations=1), lambda g, t: [1.0], MIN2, dimension=2)

    def test_reevaluate_archive(self):
        """Test archive re-evaluation is counted separately."""
        params = SpeaParams(population_size=10, archive_size=5, generations=3, seed=2)
        result = run_spea2(params, _zdt_like, MIN2, dimension=2, reevaluate_archive=True)
        assert result.evaluations == 30
        assert result.reevaluations == 10
