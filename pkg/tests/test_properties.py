"""Property-based checks for structural invariants."""

from hypothesis import given, settings, strategies as st

from dimeplan.netcore import (
    UncertainNetwork,
    network_from_dict,
    network_to_dict,
)
from dimeplan.pomdp import Action, Observation, observed_edge_set
from dimeplan.psinet import InstanceVote, vote_copeland, vote_plurality

from oracles import all_f_vectors, brute_force_copeland


@st.composite
def tiny_networks(draw):
    n = draw(st.integers(2, 6))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    chosen = draw(
        st.lists(st.sampled_from(pairs), max_size=min(len(pairs), 8), unique=True)
    )
    certain, uncertain = [], []
    for src, dst in chosen:
        if draw(st.booleans()):
            certain.append((src, dst, draw(st.floats(0.0, 1.0))))
        else:
            uncertain.append(
                (src, dst, draw(st.floats(0.0, 1.0)),
                 draw(st.floats(0.01, 0.99)))
            )
    return UncertainNetwork(n, certain, uncertain, name="prop")


@st.composite
def preference_profiles(draw):
    n_cands = draw(st.integers(1, 5))
    cands = [Action([v]) for v in range(n_cands)]
    n_votes = draw(st.integers(1, 7))
    profile = []
    for _ in range(n_votes):
        profile.append(tuple(draw(st.permutations(cands))))
    return profile


@settings(max_examples=200, derandomize=True)
@given(tiny_networks())
def test_round_trip_through_dict(net):
    assert network_from_dict(network_to_dict(net)) == net


@settings(max_examples=100, derandomize=True)
@given(tiny_networks())
def test_existence_prior_normalizes(net):
    if net.n_uncertain > 8:
        return
    total = sum(p for _, p in all_f_vectors(net))
    assert abs(total - 1.0) < 1e-9


@settings(max_examples=100, derandomize=True)
@given(tiny_networks(), st.data())
def test_observed_edges_are_exactly_uncertain_out_edges(net, data):
    k = data.draw(st.integers(1, net.n))
    nodes = data.draw(st.permutations(range(net.n)))[:k]
    action = Action(nodes)
    theta = observed_edge_set(action, net)
    expected = sorted(
        e.id for e in net.uncertain_edges if e.src in action.nodes
    )
    assert list(theta) == expected
    # certain edges never show up
    assert all(net.certain_edges[i].id not in theta for i in range(net.n_certain))


@settings(max_examples=150, derandomize=True)
@given(preference_profiles())
def test_copeland_equals_brute_force(profile):
    votes = [InstanceVote(0, r, 0.0) for r in profile]
    assert vote_copeland(votes) == brute_force_copeland(profile)


@settings(max_examples=150, derandomize=True)
@given(preference_profiles(), st.randoms(use_true_random=False))
def test_voting_winners_invariant_under_permutation(profile, rnd):
    votes = [InstanceVote(0, r, 0.0) for r in profile]
    shuffled = list(votes)
    rnd.shuffle(shuffled)
    assert vote_plurality(shuffled) == vote_plurality(votes)
    assert vote_copeland(shuffled) == vote_copeland(votes)


@settings(max_examples=200, derandomize=True)
@given(st.lists(st.integers(0, 40), min_size=1, max_size=6, unique=True))
def test_action_canonical_form(nodes):
    a = Action(nodes)
    assert a.nodes == tuple(sorted(nodes))
    assert Action(reversed(list(nodes))) == a


@settings(max_examples=100, derandomize=True)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 1)),
                max_size=6, unique_by=lambda t: t[0]))
def test_observation_entries_sorted(entries):
    o = Observation(entries)
    ids = o.edge_ids
    assert list(ids) == sorted(ids)
