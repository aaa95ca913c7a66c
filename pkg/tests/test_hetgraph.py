import numpy as np
import pytest

from marketpol.errors import (
    EndpointKindError,
    ParameterError,
    SnapshotChecksumError,
    SnapshotVersionError,
    UnknownNodeError,
)
from marketpol.hetgraph import (
    EdgeKind,
    HeteroGraph,
    LabelStore,
    NodeKind,
    PoliticalClass,
    PoliticalLabel,
    Provenance,
    ReviewEdgeAttrs,
    augment_coreview,
    degree_distribution,
    export_edge_list,
    export_node_table,
    k_core,
    snapshot_load,
    snapshot_save,
)


def triangle():
    g = HeteroGraph()
    for i in range(3):
        g.add_node(NodeKind.PRODUCT, f"p{i}")
    g.add_edge(0, 1, EdgeKind.BOUGHT_TOGETHER)
    g.add_edge(1, 2, EdgeKind.ALSO_BOUGHT)
    g.add_edge(0, 2, EdgeKind.CO_REVIEW)
    return g


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    g = HeteroGraph()
    for i in range(n):
        g.add_node(NodeKind.PRODUCT, f"p{i}")
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v, EdgeKind.BOUGHT_TOGETHER)
    return g


def naive_k_core_nodes(g, k):
    """Independent peeling oracle: repeatedly drop any node below k."""
    alive = set(range(g.node_count))
    changed = True
    while changed:
        changed = False
        for u in sorted(alive):
            deg = sum(
                1
                for kind in EdgeKind
                for v in g.neighbors(u, kind)
                if v in alive
            )
            if deg < k:
                alive.remove(u)
                changed = True
    return {g.keys[u] for u in alive}


class TestAddEdge:
    def test_review_edge_symmetric(self):
        g = HeteroGraph()
        a = g.add_node(NodeKind.AUTHOR, "alice")
        p = g.add_node(NodeKind.PRODUCT, "p0")
        assert g.add_edge(a, p, EdgeKind.REVIEWS, ReviewEdgeAttrs(rating=5.0))
        assert p in g.neighbors(a, EdgeKind.REVIEWS)
        assert a in g.neighbors(p, EdgeKind.REVIEWS)

    def test_duplicate_insert_flagged(self):
        g = HeteroGraph()
        g.add_node(NodeKind.PRODUCT, "p0")
        g.add_node(NodeKind.PRODUCT, "p1")
        assert g.add_edge(0, 1, EdgeKind.BOUGHT_TOGETHER) is True
        assert g.add_edge(1, 0, EdgeKind.BOUGHT_TOGETHER) is False
        assert g.edge_count(EdgeKind.BOUGHT_TOGETHER) == 1

    def test_endpoint_mismatch(self):
        g = HeteroGraph()
        g.add_node(NodeKind.AUTHOR, "a")
        g.add_node(NodeKind.AUTHOR, "b")
        with pytest.raises(EndpointKindError):
            g.add_edge(0, 1, EdgeKind.REVIEWS)

    def test_unknown_node(self):
        g = HeteroGraph()
        g.add_node(NodeKind.PRODUCT, "p0")
        with pytest.raises(UnknownNodeError):
            g.add_edge(0, 7, EdgeKind.ALSO_VIEWED)

    def test_symmetry_all_kinds(self):
        g = HeteroGraph()
        p0 = g.add_node(NodeKind.PRODUCT, "p0")
        p1 = g.add_node(NodeKind.PRODUCT, "p1")
        a = g.add_node(NodeKind.AUTHOR, "a")
        b = g.add_node(NodeKind.BRAND, "brand:x")
        c = g.add_node(NodeKind.CATEGORY, "category:y")
        g.add_edge(a, p0, EdgeKind.REVIEWS)
        g.add_edge(p0, p1, EdgeKind.ALSO_VIEWED)
        g.add_edge(p0, b, EdgeKind.HAS_BRAND)
        g.add_edge(p1, c, EdgeKind.IN_CATEGORY)
        for kind in EdgeKind:
            for u in range(g.node_count):
                for v in g.neighbors(u, kind):
                    assert u in g.neighbors(v, kind)


class TestKCore:
    def test_triangle_k2(self):
        result = k_core(triangle(), 2)
        assert result.node_count == 3

    def test_star_k2_empty(self):
        g = HeteroGraph()
        g.add_node(NodeKind.PRODUCT, "hub")
        for i in range(5):
            leaf = g.add_node(NodeKind.PRODUCT, f"leaf{i}")
            g.add_edge(0, leaf, EdgeKind.BOUGHT_TOGETHER)
        assert k_core(g, 2).node_count == 0

    def test_invalid_k(self):
        with pytest.raises(ParameterError):
            k_core(triangle(), 0)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_peeling_oracle(self, seed):
        g = random_graph(50, 0.08, seed)
        result = k_core(g, 3)
        assert set(result.keys) == naive_k_core_nodes(g, 3)

    def test_idempotent(self):
        g = random_graph(60, 0.1, 99)
        once = k_core(g, 3)
        twice = k_core(once, 3)
        assert set(once.keys) == set(twice.keys)

    def test_degrees_at_least_k(self):
        g = random_graph(80, 0.08, 7)
        core = k_core(g, 3)
        if core.node_count:
            assert core.total_degrees().min() >= 3

    def test_nested_cores(self):
        g = random_graph(80, 0.15, 3)
        assert set(k_core(g, 4).keys) <= set(k_core(g, 2).keys)


class TestAugment:
    def make_reviewer_graph(self, n_products, with_copurchase=False):
        g = HeteroGraph()
        a = g.add_node(NodeKind.AUTHOR, "rev")
        products = [g.add_node(NodeKind.PRODUCT, f"p{i}") for i in range(n_products)]
        for p in products:
            g.add_edge(a, p, EdgeKind.REVIEWS, ReviewEdgeAttrs(rating=4.0))
        if with_copurchase:
            g.add_edge(products[0], products[1], EdgeKind.BOUGHT_TOGETHER)
        return g

    def test_single_pair(self):
        g, report = augment_coreview(self.make_reviewer_graph(2))
        assert report.added == 1
        assert g.edge_count(EdgeKind.CO_REVIEW) == 1

    def test_existing_copurchase_suppresses(self):
        g, report = augment_coreview(self.make_reviewer_graph(2, with_copurchase=True))
        assert report.added == 0
        assert report.suppressed_existing == 1
        assert g.edge_count(EdgeKind.CO_REVIEW) == 0

    def test_four_products_six_pairs(self):
        g, report = augment_coreview(self.make_reviewer_graph(4))
        assert report.added == 6

    def test_cap_skips_reviewer(self):
        g, report = augment_coreview(self.make_reviewer_graph(4), max_reviewer_degree=3)
        assert report.added == 0
        assert report.skipped_reviewers == 1

    def test_never_author_author_or_duplicate(self):
        g = self.make_reviewer_graph(3)
        g2 = g.copy()
        augment_coreview(g2)
        augment_coreview(g2)  # rerun adds nothing new
        assert g2.edge_count(EdgeKind.CO_REVIEW) == 3
        for u in range(g2.node_count):
            for v in g2.neighbors(u, EdgeKind.CO_REVIEW):
                assert g2.kinds[u] == NodeKind.PRODUCT
                assert g2.kinds[v] == NodeKind.PRODUCT


class TestDegreeDistribution:
    def test_triangle_all(self):
        assert degree_distribution(triangle()) == {2: 3}

    def test_empty(self):
        assert degree_distribution(HeteroGraph()) == {}

    def test_matches_recount(self):
        g = random_graph(100, 0.05, 11)
        hist = degree_distribution(g, EdgeKind.BOUGHT_TOGETHER)
        recount = {}
        for u in range(g.node_count):
            d = len(g.neighbors(u, EdgeKind.BOUGHT_TOGETHER))
            recount[d] = recount.get(d, 0) + 1
        assert hist == recount

    def test_mass_equals_twice_edges(self):
        g = random_graph(60, 0.1, 5)
        hist = degree_distribution(g, EdgeKind.BOUGHT_TOGETHER)
        assert sum(d * c for d, c in hist.items()) == 2 * g.edge_count(
            EdgeKind.BOUGHT_TOGETHER
        )

    def test_zero_degree_bin(self):
        g = HeteroGraph()
        g.add_node(NodeKind.PRODUCT, "p0")
        g.add_node(NodeKind.PRODUCT, "p1")
        g.add_edge(0, 1, EdgeKind.BOUGHT_TOGETHER)
        g.add_node(NodeKind.BRAND, "brand:b")
        assert degree_distribution(g, EdgeKind.BOUGHT_TOGETHER) == {0: 1, 1: 2}


def full_model_graph():
    g = HeteroGraph()
    a = g.add_node(NodeKind.AUTHOR, "author1", wave=1)
    p0 = g.add_node(NodeKind.PRODUCT, "B000", name="Book A", main_category="Books")
    p1 = g.add_node(NodeKind.PRODUCT, "B001", name="Book B", wave=2)
    b = g.add_node(NodeKind.BRAND, "brand:acme", name="acme")
    c = g.add_node(NodeKind.CATEGORY, "category:Books", name="Books")
    g.add_edge(
        a,
        p0,
        EdgeKind.REVIEWS,
        ReviewEdgeAttrs(5.0, 3, 5, 123456, np.linspace(0, 1, 11)),
    )
    g.add_edge(a, p1, EdgeKind.REVIEWS, ReviewEdgeAttrs(2.0, 0, 1, 99))
    g.add_edge(p0, p1, EdgeKind.BOUGHT_TOGETHER)
    g.add_edge(p0, p1, EdgeKind.ALSO_BOUGHT)
    g.add_edge(p0, p1, EdgeKind.BOUGHT_AFTER_VIEWING)
    g.add_edge(p0, p1, EdgeKind.ALSO_VIEWED)
    g.add_edge(p0, p1, EdgeKind.CO_REVIEW)
    g.add_edge(p0, b, EdgeKind.HAS_BRAND)
    g.add_edge(p0, c, EdgeKind.IN_CATEGORY)
    labels = LabelStore()
    labels.apply(PoliticalLabel(p0, PoliticalClass.CONSERVATIVE, 1.0, Provenance.SEED))
    labels.apply(PoliticalLabel(p1, PoliticalClass.LIBERAL, 0.97, Provenance.MODEL, 2))
    return g, labels


class TestSnapshot:
    def test_empty_round_trip(self, tmp_path):
        path = tmp_path / "g.bin"
        snapshot_save(HeteroGraph(), path)
        g, labels = snapshot_load(path)
        assert g.node_count == 0
        assert len(labels) == 0

    def test_all_kinds_round_trip(self, tmp_path):
        g, labels = full_model_graph()
        path = tmp_path / "g.bin"
        snapshot_save(g, path, labels)
        g2, labels2 = snapshot_load(path)
        assert g2.keys == g.keys
        assert g2.kinds == g.kinds
        assert g2.node_attrs == g.node_attrs
        for kind in EdgeKind:
            assert list(g2.edges(kind)) == list(g.edges(kind))
        assert g2.review_attrs == g.review_attrs
        assert labels2.labels() == labels.labels()

    def test_round_trip_is_byte_deterministic(self, tmp_path):
        g, labels = full_model_graph()
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        snapshot_save(g, p1, labels)
        g2, labels2 = snapshot_load(p1)
        snapshot_save(g2, p2, labels2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_corrupted_trailing_bytes(self, tmp_path):
        g, labels = full_model_graph()
        path = tmp_path / "g.bin"
        snapshot_save(g, path, labels)
        blob = path.read_bytes()
        path.write_bytes(blob[:-4] + b"\x00\x00\x00\x00")
        with pytest.raises(SnapshotChecksumError):
            snapshot_load(path)

    def test_truncated_file(self, tmp_path):
        g, labels = full_model_graph()
        path = tmp_path / "g.bin"
        snapshot_save(g, path, labels)
        path.write_bytes(path.read_bytes()[:40])
        with pytest.raises(Exception) as err:
            snapshot_load(path)
        assert "truncat" in str(err.value).lower() or "Truncated" in type(err.value).__name__

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "g.bin"
        snapshot_save(HeteroGraph(), path)
        blob = bytearray(path.read_bytes())
        blob[8] = 0xFE  # bump version field
        path.write_bytes(bytes(blob))
        with pytest.raises(SnapshotVersionError):
            snapshot_load(path)

    @pytest.mark.parametrize("seed", range(3))
    def test_randomized_round_trip(self, tmp_path, seed):
        rng = np.random.default_rng(seed)
        g = HeteroGraph()
        for i in range(30):
            g.add_node(NodeKind.PRODUCT, f"p{i}", wave=int(rng.integers(0, 3)))
        authors = [g.add_node(NodeKind.AUTHOR, f"a{i}") for i in range(10)]
        for a in authors:
            for p in rng.choice(30, size=4, replace=False):
                g.add_edge(
                    a,
                    int(p),
                    EdgeKind.REVIEWS,
                    ReviewEdgeAttrs(float(rng.integers(1, 6)), 1, 2, int(rng.integers(1e9))),
                )
        for _ in range(40):
            u, v = rng.choice(30, size=2, replace=False)
            g.add_edge(int(u), int(v), EdgeKind(int(rng.integers(1, 6))))
        path = tmp_path / "g.bin"
        snapshot_save(g, path)
        g2, _ = snapshot_load(path)
        assert g2.keys == g.keys
        assert g2.node_attrs == g.node_attrs
        for kind in EdgeKind:
            assert list(g2.edges(kind)) == list(g.edges(kind))


class TestLabels:
    def test_precedence(self):
        store = LabelStore()
        assert store.apply(PoliticalLabel(0, PoliticalClass.LIBERAL, 0.96, Provenance.MODEL))
        assert store.apply(PoliticalLabel(0, PoliticalClass.CONSERVATIVE, 1.0, Provenance.HUMAN))
        # model may not overwrite human
        assert not store.apply(PoliticalLabel(0, PoliticalClass.LIBERAL, 0.99, Provenance.MODEL))
        assert store.get(0).cls == PoliticalClass.CONSERVATIVE

    def test_seed_probability_must_be_one(self):
        with pytest.raises(Exception):
            PoliticalLabel(0, PoliticalClass.LIBERAL, 0.9, Provenance.SEED)

    def test_csv_round_trip(self, tmp_path):
        g, labels = full_model_graph()
        path = tmp_path / "labels.csv"
        labels.save_csv(path, g.keys)
        loaded = LabelStore.load_csv(path, g.id_of)
        assert loaded.labels() == labels.labels()


class TestExport:
    def test_edge_list_and_node_table(self, tmp_path):
        g, labels = full_model_graph()
        edges_path = tmp_path / "edges.txt"
        nodes_path = tmp_path / "nodes.csv"
        n_edges = export_edge_list(g, edges_path)
        n_nodes = export_node_table(g, nodes_path, labels)
        lines = edges_path.read_text().strip().splitlines()
        assert len(lines) == n_edges == g.edge_count()
        assert lines[0].count("\t") == 2
        body = nodes_path.read_text().strip().splitlines()
        assert body[0] == "key,kind,label,category"
        assert len(body) == n_nodes + 1
        assert any("conservative" in line for line in body)
