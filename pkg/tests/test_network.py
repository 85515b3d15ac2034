import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfdlab.network import (
    E,
    N,
    S,
    W,
    NetworkConfig,
    ParameterError,
    build_network,
    round_half_up,
    sample_block_lengths,
)


@pytest.mark.parametrize(
    "field,kwargs",
    [
        ("rows", dict(rows=0)),
        ("cols", dict(cols=-1)),
        ("ell", dict(ell=5)),
        ("lambda", dict(lam=0.0)),
        ("delta", dict(delta=-0.1)),
        ("p", dict(p=1.5)),
        ("delta", dict(ell=6, delta=0.8)),
    ],
)
def test_config_errors_name_the_field(field, kwargs):
    with pytest.raises(ParameterError) as exc:
        NetworkConfig(**kwargs)
    assert exc.value.field == field


def test_round_half_up():
    assert [round_half_up(x) for x in (2.5, 3.5, 3.49, 7.0)] == [3, 4, 3, 7]


def test_uniform_lengths_when_delta_zero(small_net):
    assert (small_net.lengths == 6).all()
    assert small_net.ncells == 6 * 4 * 12


@settings(deadline=None, max_examples=40)
@given(
    st.integers(1, 6),
    st.integers(1, 6),
    st.integers(6, 14),
    st.floats(0, 0.6),
    st.integers(0, 10**6),
)
def test_topology_invariants(rows, cols, ell, delta, seed):
    if ell * (1 - delta) < 2:
        return
    net = build_network(NetworkConfig(rows=rows, cols=cols, ell=ell, delta=delta, seed=seed))
    I = rows * cols
    # every block arrives at exactly one intersection with its own heading
    assert sorted(net.inc.ravel()) == list(range(4 * I))
    for i in range(I):
        r, c = divmod(i, cols)
        for d in range(4):
            b = net.inc[i, d]
            assert b % 4 == d
            assert net.block_target(b) == (r, c)
    # the two directions of a street segment share its length
    for i in range(I):
        assert net.lengths[net.out[i, N]] == net.lengths[net.inc[i, S]]
        assert net.lengths[net.out[i, E]] == net.lengths[net.inc[i, W]]
    assert (net.lengths >= 2).all()
    assert net.ncells == net.lengths.sum()


def test_cell_links_follow_blocks(small_net):
    net = small_net
    for b in range(net.n_blocks):
        s, L = net.starts[b], net.lengths[b]
        assert net.prev[s] == net.ncells
        assert net.nxt[s + L - 1] == s + L - 1
        assert list(net.nxt[s : s + L - 1]) == list(range(s + 1, s + L))
        assert (net.block_of_cell[s : s + L] == b).all()


def test_block_lengths_two_point_law():
    x = sample_block_lengths(1000, 10, 0.4, seed=1)
    assert set(np.unique(x)) == {6, 14}
    assert x.mean() == pytest.approx(10, rel=0.01)
    assert x.std() / x.mean() == pytest.approx(0.4, rel=0.02)


@settings(deadline=None, max_examples=50)
@given(st.integers(100, 400), st.integers(8, 20), st.floats(0, 0.75), st.integers(0, 10**6))
def test_block_mean_within_five_percent(n, ell, delta, seed):
    if ell * (1 - delta) < 2:
        return
    x = sample_block_lengths(n, ell, delta, seed)
    assert abs(x.mean() - ell) <= 0.05 * ell


def test_block_lengths_are_seeded():
    a = sample_block_lengths(64, 10, 0.5, 7)
    assert np.array_equal(a, sample_block_lengths(64, 10, 0.5, 7))
    assert not np.array_equal(a, sample_block_lengths(64, 10, 0.5, 8))


def test_fingerprint_tracks_layout():
    a = build_network(NetworkConfig(rows=2, cols=2, delta=0.5, seed=1))
    b = build_network(NetworkConfig(rows=2, cols=2, delta=0.5, seed=1))
    c = build_network(NetworkConfig(rows=2, cols=2, delta=0.5, seed=2))
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != c.fingerprint()


def test_to_text_lists_every_block(small_net):
    lines = small_net.to_text().splitlines()
    assert len(lines) == 2 + small_net.n_blocks
    assert lines[2].startswith("0,N,0,0,2,0,6,0")


def test_degree_and_reconstruction():
    cfg = NetworkConfig(rows=5, cols=3, delta=0.5, seed=11)
    a, b = build_network(cfg), build_network(cfg)
    assert a.inc.shape == a.out.shape == (15, 4)
    for name in ("lengths", "starts", "inc", "out", "nxt", "prev"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
