import itertools
from dataclasses import replace

import numpy as np
import pytest

from pkgnet.core import Tensor, ops
from pkgnet.envs import SymbolGrid, generate_sokoban_mazes, get_variation
from pkgnet.errors import CheckpointError, DimensionError
from pkgnet.knowledge import Edge, KnowledgeGraph, build_pacman_kg, build_sokoban_kg, complete_sokoban_kg
from pkgnet.knowledge.variants import apply_variant, scene_graph
from pkgnet.models.knowledge import KGVariant
from pkgnet.networks import layers
from pkgnet.networks.baseline import BaselineModel
from pkgnet.networks.factory import build_model, load_model, model_config, save_model
from pkgnet.networks.layers import ECCLayer, KGConv, Pooling, broadcast, occupancy
from pkgnet.networks.pkgnet import PKGNetModel

ONE_ONE = get_variation("one-one")
OFFSETS = list(itertools.product((-1, 0, 1), repeat=2))


@pytest.fixture
def one_one_kg():
    return build_sokoban_kg(ONE_ONE, include_test_entities=False)


@pytest.fixture
def mazes():
    train, _ = generate_sokoban_mazes(ONE_ONE, seed=0, num_train=3, num_test=1)
    return train


def grid_graph(size: int) -> KnowledgeGraph:
    """Cells as vertices; an edge from every in-bounds neighbour (and self) typed by its offset"""
    cells = tuple(f"{i},{j}" for i in range(size) for j in range(size))
    types = tuple(f"{di},{dj}" for di, dj in OFFSETS)
    edges = []
    for i, j in itertools.product(range(size), repeat=2):
        for di, dj in OFFSETS:
            si, sj = i + di, j + dj
            if 0 <= si < size and 0 <= sj < size:
                edges.append(Edge(f"{si},{sj}", f"{i},{j}", f"{di},{dj}"))
    return KnowledgeGraph(cells, cells, types, tuple(edges))


def test_ecc_on_grid_graph_is_a_convolution(rng):
    size, d_in, d_out = 5, 3, 4
    kg = grid_graph(size)
    layer = ECCLayer(rng, kg.edge_width, d_in, d_out)
    layer.bias.data = rng.normal(size=d_out).astype(np.float32)
    x = rng.normal(size=(size, size, d_in)).astype(np.float32)

    out = layer(kg, Tensor(x.reshape(size * size, d_in))).data.reshape(size, size, d_out)

    filters = layer.filters(kg).data
    kernel = np.zeros((3, 3, d_in, d_out), dtype=np.float32)
    for row, edge in enumerate(kg.edges):
        di, dj = map(int, edge.type.split(","))
        kernel[di + 1, dj + 1] = filters[row]
    expected = ops.conv2d(Tensor(x), Tensor(kernel), Tensor(layer.bias.data)).data
    np.testing.assert_allclose(out, expected, atol=1e-5)


def test_ecc_matches_an_edge_loop(rng, one_one_kg):
    layer = ECCLayer(rng, one_one_kg.edge_width, 5, 3)
    layer.bias.data = rng.normal(size=3).astype(np.float32)
    vertices = rng.normal(size=(one_one_kg.num_vertices, 5)).astype(np.float32)
    out = layer(one_one_kg, Tensor(vertices)).data

    filters = layer.filters(one_one_kg).data
    expected = np.tile(layer.bias.data, (one_one_kg.num_vertices, 1))
    for row, edge in enumerate(one_one_kg.edges):
        expected[one_one_kg.index(edge.dst)] += vertices[one_one_kg.index(edge.src)] @ filters[row]
    np.testing.assert_allclose(out, expected, atol=1e-5)


def test_ecc_without_edges_returns_the_bias(rng, one_one_kg):
    kg = apply_variant(one_one_kg, KGVariant.NO_EDGES)
    layer = ECCLayer(rng, kg.edge_width, 4, 3)
    layer.bias.data = np.array([1.0, -2.0, 0.5], dtype=np.float32)
    out = layer(kg, Tensor(rng.normal(size=(kg.num_vertices, 4)))).data
    np.testing.assert_allclose(out, np.tile(layer.bias.data, (kg.num_vertices, 1)))


def test_ecc_identity_filter_copies_the_source(rng):
    kg = KnowledgeGraph(("x", "y", "z"), ("x", "y", "z"), ("t",), (Edge("x", "y", "t"),))
    layer = ECCLayer(rng, 1, 3, 3)
    layer.filter.weight.data[:] = 0.0
    layer.filter.bias.data = np.eye(3, dtype=np.float32).reshape(-1)
    vertices = rng.normal(size=(3, 3)).astype(np.float32)
    out = layer(kg, Tensor(vertices)).data
    np.testing.assert_allclose(out[1], vertices[0], atol=1e-6)
    assert not out[0].any() and not out[2].any()


def test_ecc_width_mismatch(rng, one_one_kg):
    layer = ECCLayer(rng, one_one_kg.edge_width, 4, 3)
    with pytest.raises(DimensionError):
        layer(one_one_kg, Tensor(np.zeros((one_one_kg.num_vertices, 5))))
    with pytest.raises(DimensionError):
        ECCLayer(rng, one_one_kg.edge_width + 1, 4, 3).filters(one_one_kg)


def test_ecc_gradients(rng, grad_check, one_one_kg):
    kg = one_one_kg
    layer = ECCLayer(rng, kg.edge_width, 3, 2)
    layer.bias.data = rng.normal(size=2).astype(np.float32)
    vertices = Tensor(rng.normal(size=(kg.num_vertices, 3)), requires_grad=True, name="vertices")
    weights = rng.normal(size=(kg.num_vertices, 2)).astype(np.float32)
    params = [vertices, layer.filter.weight, layer.filter.bias, layer.bias]

    src, dst = (m.astype(np.float64) for m in kg.incidence())
    hidden_weight = layer.hidden.weight.data.astype(np.float64)
    hidden = np.maximum(kg.edge_features() @ hidden_weight + layer.hidden.bias.data, 0.0)

    def reference(v, filter_weight, filter_bias, bias):
        filters = (hidden @ filter_weight + filter_bias).reshape(len(kg.edges), 3, 2)
        out = dst @ np.einsum("ed,edo->eo", src @ v, filters) + bias
        return (out * weights).sum()

    grad_check(lambda: ops.sum_all(ops.mul(layer(kg, vertices), weights)), params, reference)


def test_broadcast_places_vertex_vectors(rng, one_one_kg):
    vertices = Tensor(rng.normal(size=(one_one_kg.num_vertices, 6)))
    blank = SymbolGrid.blank(4, 4)
    assert not broadcast(occupancy(one_one_kg, [blank]), vertices).data.any()

    grid = blank.replace({(0, 1): "A", (2, 2): "b", (3, 0): "b"})
    out = broadcast(occupancy(one_one_kg, [grid]), vertices).data[0]
    np.testing.assert_array_equal(out[0, 1], vertices.data[one_one_kg.index("A")])
    np.testing.assert_array_equal(out[2, 2], vertices.data[one_one_kg.index("b")])
    np.testing.assert_array_equal(out[2, 2], out[3, 0])
    assert np.count_nonzero(np.abs(out).sum(axis=-1)) == 3


def test_occupancy_ignores_symbols_outside_the_graph(one_one_kg):
    grid = SymbolGrid.from_rows(["Ac", "  "])
    delta = occupancy(one_one_kg, [grid])
    assert delta.sum() == 1.0


def identity_pooling(rng, width):
    pool = Pooling(rng, width, width)
    pool.projection.data = np.eye(width, dtype=np.float32)
    return pool


def test_pooling_single_and_double_occurrence(rng, one_one_kg):
    grid = SymbolGrid.blank(3, 3).replace({(0, 0): "A", (1, 1): "b", (2, 2): "b"})
    delta = occupancy(one_one_kg, [grid])
    state = rng.normal(size=(1, 3, 3, 4)).astype(np.float32)
    prior = Tensor(rng.normal(size=(one_one_kg.num_vertices, 4)))
    pooled = identity_pooling(rng, 4)(Tensor(state), delta, prior).data[0]
    np.testing.assert_allclose(pooled[one_one_kg.index("A")], state[0, 0, 0], atol=1e-6)
    np.testing.assert_allclose(pooled[one_one_kg.index("b")], (state[0, 1, 1] + state[0, 2, 2]) / 2, atol=1e-6)
    np.testing.assert_allclose(pooled[one_one_kg.index("+")], prior.data[one_one_kg.index("+")])


def test_pooling_inverts_broadcast_for_present_entities(rng, one_one_kg, mazes):
    vertices = Tensor(rng.normal(size=(one_one_kg.num_vertices, 5)))
    delta = occupancy(one_one_kg, mazes)
    pooled = identity_pooling(rng, 5)(broadcast(delta, vertices), delta, vertices).data
    for sample in pooled:
        np.testing.assert_allclose(sample, vertices.data, atol=1e-5)


def test_kgconv_without_graph_is_plain_convolution(rng, one_one_kg):
    layer = KGConv(rng, 3, 4, 5)
    state = Tensor(rng.normal(size=(1, 4, 4, 3)))
    delta = occupancy(one_one_kg, [SymbolGrid.blank(4, 4)])
    out = layer(state, delta, Tensor(rng.normal(size=(one_one_kg.num_vertices, 4))))
    np.testing.assert_allclose(out.data, layer.spatial(state).data, atol=1e-6)


def test_kgconv_zero_state_is_the_graph_projection(rng, one_one_kg, mazes):
    layer = KGConv(rng, 3, 4, 5)
    vertices = Tensor(rng.normal(size=(one_one_kg.num_vertices, 4)))
    delta = occupancy(one_one_kg, mazes[:1])
    out = layer(Tensor(np.zeros((1, 10, 10, 3))), delta, vertices).data
    expected = layer.graph(broadcast(delta, vertices)).data + layer.spatial.bias.data
    np.testing.assert_allclose(out, expected, atol=1e-6)


def sokoban_model(rng, kg, **kwargs):
    return PKGNetModel(rng, kg.vertex_width, kg.edge_width, 4, **kwargs)


def test_pkgnet_output_shapes(one_one_kg, mazes):
    model = sokoban_model(np.random.default_rng(0), one_one_kg, value_head=True)
    out = model(one_one_kg, mazes)
    assert out.q.shape == (3, 4)
    assert out.value.shape == (3,)
    assert model(one_one_kg, mazes[0]).q.shape == (1, 4)


def test_pkgnet_is_deterministic_per_init_stream(one_one_kg, mazes):
    first = sokoban_model(np.random.default_rng(7), one_one_kg)(one_one_kg, mazes).q.data
    second = sokoban_model(np.random.default_rng(7), one_one_kg)(one_one_kg, mazes).q.data
    np.testing.assert_array_equal(first, second)


def test_pkgnet_reads_the_graph(one_one_kg, mazes):
    model = sokoban_model(np.random.default_rng(0), one_one_kg)
    base = model(one_one_kg, mazes).q.data
    without_fills = one_one_kg.with_edges(e for e in one_one_kg.edges if e.type != "fills")
    assert not np.allclose(base, model(without_fills, mazes).q.data)


def test_pkgnet_consumes_train_and_test_crops():
    complete = complete_sokoban_kg(ONE_ONE)
    train = scene_graph(complete, KGVariant.BASE, ONE_ONE.symbols("train"))
    test = scene_graph(complete, KGVariant.BASE, ONE_ONE.symbols("test"))
    _, test_mazes = generate_sokoban_mazes(ONE_ONE, seed=0, num_train=1, num_test=2)
    model = sokoban_model(np.random.default_rng(0), train)
    assert model(test, test_mazes).q.shape == (2, 4)


def test_pkgnet_weight_network_receives_gradient(one_one_kg, mazes):
    model = sokoban_model(np.random.default_rng(0), one_one_kg)
    ops.sum_all(model(one_one_kg, mazes).q).backward()
    params = model.parameters()
    assert np.abs(params["enrich.0.hidden.weight"].grad).sum() > 0
    assert np.abs(params["side_graph.1.filter.weight"].grad).sum() > 0


def test_pkgnet_rejects_a_graph_of_other_widths(one_one_kg, mazes):
    model = sokoban_model(np.random.default_rng(0), one_one_kg)
    with pytest.raises(DimensionError):
        model(build_pacman_kg(), mazes)


def test_no_sidebranch_model_has_fewer_parameters(one_one_kg):
    full = sokoban_model(np.random.default_rng(0), one_one_kg)
    trunk = sokoban_model(np.random.default_rng(0), one_one_kg, side_branch=False)
    assert trunk.parameter_count() < full.parameter_count()
    assert not any(name.startswith("side") for name in trunk.parameters())


def test_baseline_is_smaller_than_the_edgeless_graph_network():
    kg = apply_variant(complete_sokoban_kg(ONE_ONE), KGVariant.NO_EDGES)
    baseline = BaselineModel(np.random.default_rng(0), kg.registry, 4)
    graph_net = sokoban_model(np.random.default_rng(0), kg)
    assert baseline.parameter_count() < graph_net.parameter_count()


def test_baseline_constant_on_blank_grids():
    model = BaselineModel(np.random.default_rng(0), ONE_ONE.all_symbols(), 4)
    first = model(None, SymbolGrid.blank(10, 10)).q.data
    second = model(None, SymbolGrid.blank(10, 10)).q.data
    np.testing.assert_array_equal(first, second)


def test_factory_round_trips_through_a_checkpoint(tmp_path, one_one_kg, mazes):
    config = model_config("pkgnet", "sokoban", one_one_kg.registry, one_one_kg.edge_width, 4)
    model = build_model(config, np.random.default_rng(3))
    save_model(tmp_path / "final.pkgn", model, config, {"name": "x"})
    loaded, extra = load_model(tmp_path / "final.pkgn")
    assert extra["experiment"] == {"name": "x"}
    np.testing.assert_array_equal(model(one_one_kg, mazes).q.data, loaded(one_one_kg, mazes).q.data)


def test_factory_builds_the_pacman_head():
    kg = build_pacman_kg()
    config = model_config("baseline", "pacman", kg.registry, kg.edge_width, 4)
    model = build_model(config, np.random.default_rng(0))
    assert [layer.weight.shape[1] for layer in model.head.layers] == [100, 50]
    assert len(model.convs) == 4


def test_load_model_needs_a_model_config(tmp_path):
    from pkgnet.core import save_checkpoint

    save_checkpoint(tmp_path / "bare.pkgn", {"w": np.zeros(2, dtype=np.float32)})
    with pytest.raises(CheckpointError):
        load_model(tmp_path / "bare.pkgn")


def test_weight_network_width_is_eight():
    assert layers.WEIGHT_NET_HIDDEN == 8


def trunk_features(model, kg, grid):
    delta = occupancy(kg, [grid])
    vertices = Tensor(kg.vertex_features())
    for layer in model.enrich:
        vertices = ops.relu(layer(kg, vertices))
    state = broadcast(delta, vertices)
    for layer in model.trunk:
        state = ops.relu(layer(state, delta, vertices))
    return state.data[0]


SCENE = {(7, 7): "A", (8, 9): "b", (10, 8): "B", (9, 7): "+"}


def scene(size=20, shift=(0, 0)):
    dy, dx = shift
    return SymbolGrid.blank(size, size).replace({(i + dy, j + dx): s for (i, j), s in SCENE.items()})


@pytest.mark.parametrize("shift", [(1, 2), (3, 0), (2, 3)])
def test_scene_trunk_is_translation_equivariant_away_from_borders(one_one_kg, shift):
    model = sokoban_model(np.random.default_rng(0), one_one_kg)
    for layer in model.trunk:
        layer.spatial.bias.data = np.random.default_rng(1).normal(size=layer.spatial.bias.shape).astype(np.float32)
    base = trunk_features(model, one_one_kg, scene())
    moved = trunk_features(model, one_one_kg, scene(shift=shift))

    dy, dx = shift
    radius, size = len(model.trunk), 20
    np.testing.assert_allclose(
        moved[radius + dy:size - radius, radius + dx:size - radius],
        base[radius:size - radius - dy, radius:size - radius - dx],
        atol=1e-5,
    )


@pytest.mark.parametrize("shift", [(1, 2), (3, 0), (2, 3)])
def test_pkgnet_output_ignores_translation_of_interior_content(one_one_kg, shift):
    model = sokoban_model(np.random.default_rng(0), one_one_kg, value_head=True)
    base, moved = model(one_one_kg, scene()), model(one_one_kg, scene(shift=shift))
    np.testing.assert_allclose(moved.q.data, base.q.data, atol=1e-5)
    np.testing.assert_allclose(moved.value.data, base.value.data, atol=1e-5)


def test_edgeless_network_cannot_tell_entities_apart(mazes):
    kg = apply_variant(complete_sokoban_kg(ONE_ONE), KGVariant.NO_EDGES)
    model = sokoban_model(np.random.default_rng(0), kg, value_head=True)
    base = model(kg, mazes)
    symbols = list(kg.entities)
    rng = np.random.default_rng(5)
    for _ in range(3):
        relabel = dict(zip(symbols, (str(s) for s in rng.permutation(symbols))))
        renamed = [g.replace({p: relabel[s] for s in symbols for p in g.find(s)}) for g in mazes]
        out = model(kg, renamed)
        np.testing.assert_allclose(out.q.data, base.q.data, atol=1e-5)
        np.testing.assert_allclose(out.value.data, base.value.data, atol=1e-5)


def test_edgeless_network_ignores_vertex_order(mazes):
    kg = apply_variant(complete_sokoban_kg(ONE_ONE), KGVariant.NO_EDGES)
    model = sokoban_model(np.random.default_rng(0), kg)
    base = model(kg, mazes).q.data
    rng = np.random.default_rng(2)
    for _ in range(3):
        shuffled = replace(kg, entities=tuple(str(s) for s in rng.permutation(kg.entities)))
        np.testing.assert_allclose(model(shuffled, mazes).q.data, base, atol=1e-5)
