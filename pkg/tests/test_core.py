from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from toylocal.core import (
    N_MAX,
    Bijection,
    ImpossibleOutcome,
    InvalidMeasurement,
    InvalidOutcomeSet,
    Measurement,
    Mixture,
    OnticRegister,
    OutcomeSet,
    ParticleState,
    StateSpaceTooLarge,
    SystemState,
    all_states,
    apply_local_map,
    find_outcome,
    measure,
    posterior_mixture,
    retrodict,
    rotation,
    validate_measurement,
    validate_outcome_set,
)
from toylocal.enumeration import enumerate_valid_measurements
from toylocal.formats import bundled_measurement
from toylocal.rng import Stream

half = Fraction(1, 2)


# -- types ----------------------------------------------------------------------------

@pytest.mark.parametrize("bad", [-1, 4, 1.0, "2", True])
def test_particle_state_rejects(bad):
    with pytest.raises(ValueError):
        ParticleState(bad)


def test_system_state_bounds():
    assert SystemState((0, 3)).num_particles == 2
    assert SystemState.of(1, 2).particles == (ParticleState(1), ParticleState(2))
    with pytest.raises(ValueError):
        SystemState(())
    with pytest.raises(ValueError):
        SystemState([0] * (N_MAX + 1))
    with pytest.raises(ValueError):
        SystemState((0, 5))


def test_state_codes_round_trip():
    for n in (1, 2, 3):
        for c in range(4**n):
            assert SystemState.from_code(c, n).code == c
    assert SystemState((1, 2)).code == 6


# -- validate_outcome_set ---------------------------------------------------------------------

def test_mixed_column_passes():
    # (2,0,0,2,2): ratios 2/5 and 3/5, both at least a quarter
    rows = [(2, 1, 0), (0, 1, 0), (0, 3, 0), (2, 3, 1), (2, 1, 1)]
    assert validate_outcome_set(rows)
    assert OutcomeSet(tuple(rows)).column(1) == (2, 0, 0, 2, 2)


def test_single_particle_sets_pass():
    assert validate_outcome_set([(0,), (1,)])


def test_duplicate_row():
    rep = validate_outcome_set([(0,), (1,), (2,), (0,)])
    assert not rep and rep.violation == "duplicate_row" and rep.row == (0,)


def test_single_valued_column_is_column_2():
    rep = validate_outcome_set([(1, 1), (0, 1), (2, 1), (3, 1)])
    assert not rep
    assert rep.violation == "single_valued_column"
    assert rep.column == 2
    assert rep.postulate == "5(i)"


def test_below_quarter():
    rep = validate_outcome_set([(0, 0), (1, 1), (2, 2), (3, 3), (0, 3)])
    assert rep.violation == "below_quarter" and rep.column == 1 and rep.postulate == "5(ii)"


def test_quarter_boundary_is_inclusive():
    # 4 rows, value 3 once: 4*1 >= 4 passes
    assert validate_outcome_set([(0,), (1,), (2,), (3,)])
    # 5 rows, a value once: 4*1 < 5 fails
    rows = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]
    assert validate_outcome_set(rows).violation == "below_quarter"


def test_empty_and_ragged():
    with pytest.raises(ValueError, match="empty outcome set"):
        validate_outcome_set([])
    with pytest.raises(ValueError):
        validate_outcome_set([(0,), (1, 2)])


def test_outcome_set_type_enforces_rules():
    with pytest.raises(InvalidOutcomeSet):
        OutcomeSet(((0,),))
    oc = OutcomeSet(((0, 0), (1, 1)), label=3)
    assert oc.size == 2 and (1, 1) in oc and (0, 1) not in oc


def _column_ok_bruteforce(rows) -> bool:
    """Direct transcription of the rules with Fractions."""
    if len(set(rows)) != len(rows):
        return False
    L = len(rows)
    for col in zip(*rows):
        counts = Counter(col)
        if len(counts) < 2:
            return False
        if any(Fraction(c, L) < Fraction(1, 4) for c in counts.values()):
            return False
    return True


@settings(max_examples=400, deadline=None)
@given(
    st.integers(1, 3).flatmap(
        lambda n: st.lists(st.tuples(*[st.integers(0, 3)] * n), min_size=1, max_size=10)
    )
)
def test_validate_outcome_set_matches_bruteforce(rows):
    assert bool(validate_outcome_set(rows)) == _column_ok_bruteforce(rows)


# -- validate_measurement ---------------------------------------------------------------------

def test_bundled_measurements_validate(A, B, P, P_prime, bell):
    for m in (A, B, P, P_prime, bell):
        assert validate_measurement(m), m


def test_singleton_outcome_rejected():
    rep = validate_measurement(Measurement([[(0,), (1,), (2,)], [(3,)]]))
    assert not rep and rep.violation == "single_valued_column" and rep.outcome == 1
    assert "Postulate 5" in rep.describe()


def test_overlap_rejected():
    rep = validate_measurement(Measurement([[(0,), (1,)], [(1,), (2,)], [(2,), (3,)]]))
    assert rep.violation == "overlap" and rep.row == (1,) and rep.postulate == "2"


def test_not_exhaustive_rejected(bell):
    rep = validate_measurement(Measurement(bell.outcomes[:3], 2))
    assert rep.violation == "not_exhaustive" and rep.row == (0, 1)


def test_empty_outcome_rejected():
    rep = validate_measurement(Measurement([[(0,), (1,), (2,), (3,)], []], 1))
    assert rep.violation == "empty_outcome"


def test_too_many_particles():
    with pytest.raises(StateSpaceTooLarge, match="state space too large"):
        validate_measurement(Measurement([], num_particles=N_MAX + 1))


def test_one_outcome_measurement_allowed():
    assert validate_measurement(Measurement([[(v,) for v in range(4)]]))


def test_large_product_measurement():
    # N = N_MAX: outcome r is "first particle in {0,1}" vs "{2,3}", explicit over 65,536 states
    states = all_states(N_MAX)
    m = Measurement([[s for s in states if s[0] < 2], [s for s in states if s[0] >= 2]], N_MAX)
    assert validate_measurement(m)
    assert find_outcome(m, (3,) + (0,) * (N_MAX - 1)) == 1


def test_validity_invariant_exactly_one_set(small_measurements):
    for m in small_measurements:
        assert validate_measurement(m)
        for x in all_states(m.num_particles):
            hits = [r for r, rows in enumerate(m.outcomes) if x in rows]
            assert len(hits) == 1
            assert find_outcome(m, x) == hits[0]


def test_operations_refuse_invalid_measurement():
    bad = Measurement([[(0,), (1,), (2,)], [(3,)]])
    with pytest.raises(InvalidMeasurement):
        find_outcome(bad, (0,))
    with pytest.raises(InvalidMeasurement):
        posterior_mixture(bad, 0)


# -- find_outcome / measure ---------------------------------------------------------------------

def test_find_outcome_examples(A, bell):
    assert find_outcome(A, (0,)) == 0
    assert find_outcome(bell, (2, 1)) == 1
    assert find_outcome(bell, (3, 1)) == 2


def test_find_outcome_wrong_arity(bell):
    with pytest.raises(ValueError):
        find_outcome(bell, (1,))


def test_measure_A_on_zero(A, rng):
    seen = Counter()
    for i in range(2000):
        r, post = measure(A, (0,), rng.spawn(i))
        assert r == 0
        seen[post] += 1
    assert set(seen) == {(0,), (1,)}
    assert chisquare(list(seen.values())).pvalue > 0.001


def test_bell_twice_exhaustive(bell, rng):
    for i, x in enumerate(all_states(2)):
        r1, post = measure(bell, x, rng.spawn(i))
        r2, post2 = measure(bell, post, rng.spawn(100 + i))
        assert r1 == r2
        assert post in bell.outcomes[r1] and post2 in bell.outcomes[r1]


@settings(max_examples=300, deadline=None)
@given(data=st.data(), seed=st.integers(0, 2**64 - 1))
def test_repeatability_property(small_measurements, data, seed):
    m = data.draw(st.sampled_from(small_measurements))
    x = data.draw(st.tuples(*[st.integers(0, 3)] * m.num_particles))
    r, post = measure(m, x, Stream(seed))
    assert find_outcome(m, post) == r


def test_measure_uniform_over_rows(bell):
    x = (2, 1)
    r = find_outcome(bell, x)
    base = Stream(77)
    counts = Counter(measure(bell, x, base.spawn(i))[1] for i in range(10_000))
    assert set(counts) == set(bell.outcomes[r])
    assert chisquare([counts[row] for row in bell.outcomes[r]]).pvalue >= 0.001


# -- manipulations ---------------------------------------------------------------------------------

def test_apply_local_map_examples():
    assert apply_local_map((3, 1), 2, rotation(2)) == (3, 3)
    assert apply_local_map((0,), 1, rotation(3)) == (3,)
    for x in all_states(2):
        for i in (1, 2):
            assert apply_local_map(x, i, rotation(0)) == x
    with pytest.raises(IndexError):
        apply_local_map((0, 0), 3, rotation(1))
    with pytest.raises(IndexError):
        apply_local_map((0, 0), 0, rotation(1))


def test_only_target_changes():
    u = Bijection((2, 0, 3, 1))
    for x in all_states(3):
        y = apply_local_map(x, 2, u)
        assert (y[0], y[2]) == (x[0], x[2]) and y[1] == u(x[1])


def test_rotation_examples():
    assert rotation(1)(3) == 0
    assert rotation(0) == Bijection.identity()
    assert rotation(2) @ rotation(2) == rotation(0)
    for bad in (-1, 4, 1.5):
        with pytest.raises(ValueError):
            rotation(bad)


def test_group_law():
    for a, b in product(range(4), repeat=2):
        assert rotation(a) @ rotation(b) == rotation((a + b) % 4)


def test_bijection_validation_and_inverse():
    with pytest.raises(ValueError):
        Bijection((0, 0, 1, 2))
    u = Bijection((3, 0, 2, 1))
    assert u @ u.inverse() == Bijection.identity()
    assert rotation(3).rotation_index == 3 and u.rotation_index is None


# -- mixtures --------------------------------------------------------------------------------------

def test_mixture_invariants():
    with pytest.raises(ValueError):
        Mixture({(0,): Fraction(1, 3), (1,): Fraction(1, 3)})
    with pytest.raises(ValueError):
        Mixture([((0,), half), ((0,), half)])
    with pytest.raises(ValueError):
        Mixture({(0,): 0, (1,): 1})
    with pytest.raises(TypeError):
        Mixture({(0,): 0.5, (1,): 0.5})
    m = Mixture({(0,): "1/2", (1,): half})
    assert m.prob((0,)) == half and m.prob((3,)) == 0
    assert repr(m) == "[1/2 of 0, 1/2 of 1]"


def test_posterior_examples(B, bell):
    assert posterior_mixture(B, 0) == Mixture({(1,): half, (2,): half})
    assert posterior_mixture(bell, 0) == Mixture.uniform([(v, v) for v in range(4)])
    with pytest.raises(IndexError):
        posterior_mixture(B, 2)


def test_posterior_rows_have_probability_one_over_L(small_measurements):
    for m in small_measurements:
        for r, rows in enumerate(m.outcomes):
            post = posterior_mixture(m, r)
            assert all(p == Fraction(1, len(rows)) for _, p in post.support)


def test_no_certainty(small_measurements):
    for m in small_measurements:
        for r in range(m.R):
            post = posterior_mixture(m, r)
            for n in range(1, m.num_particles + 1):
                big = [v for v, p in post.marginal(n).items() if p >= Fraction(1, 4)]
                assert len(big) >= 2


def test_retrodict_examples(A, B):
    prior = Mixture({(0,): half, (1,): half})
    assert retrodict(prior, B, 0) == Mixture.point((1,))
    assert retrodict(prior, A, 0) == prior
    uniform = Mixture.uniform([(v,) for v in range(4)])
    assert retrodict(uniform, B, 1) == Mixture({(3,): half, (0,): half})


def test_retrodict_impossible(A):
    with pytest.raises(ImpossibleOutcome, match="outcome impossible under prior"):
        retrodict(Mixture.point((0,)), A, 1)


def _grid_priors():
    """Every prior on {0..3} with probabilities in multiples of 1/4."""
    for combo in combinations_with_replacement(range(4), 4):
        counts = Counter(combo)
        yield Mixture({(v,): Fraction(c, 4) for v, c in counts.items()})


def test_bayes_consistency_against_joint():
    measurements = enumerate_valid_measurements(1) + [bundled_measurement(n) for n in ("A", "B", "P_prime")]
    priors = list(_grid_priors())
    assert len(priors) == 35
    for m in measurements:
        blocks = [set(v for (v,) in rows) for rows in m.outcomes]
        for prior in priors:
            # joint over (pre, r, post) built straight from the rules
            joint = Counter()
            for (pre,), p in prior.support:
                r = next(i for i, b in enumerate(blocks) if pre in b)
                for post in blocks[r]:
                    joint[(pre, r, post)] += p / len(blocks[r])
            for r in range(m.R):
                p_r = sum(w for (_, rr, _), w in joint.items() if rr == r)
                if p_r == 0:
                    with pytest.raises(ImpossibleOutcome):
                        retrodict(prior, m, r)
                    continue
                pre = Counter()
                post = Counter()
                for (a, rr, b), w in joint.items():
                    if rr == r:
                        pre[(a,)] += w / p_r
                        post[(b,)] += w / p_r
                assert retrodict(prior, m, r) == Mixture(pre)
                assert posterior_mixture(m, r) == Mixture(post)


# -- register ------------------------------------------------------------------------------------------

def test_register_hides_values_behind_outcomes(bell):
    reg = OnticRegister()
    reg.add("a", 2)
    reg.add("b", 1)
    r = reg.measure(bell, ["a", "b"], Stream(1))
    assert r == 1
    assert tuple(reg.god_view()[k] for k in ("a", "b")) in bell.outcomes[1]
    reg.apply("a", rotation(1))
    with pytest.raises(KeyError):
        reg.add("a", 0)
    with pytest.raises(ValueError):
        reg.measure(bell, ["a", "a"], Stream(1))
