import numpy as np
import pytest

from hullspace.config import RemConfig
from hullspace.events import EventLog
from hullspace.generator import sample_constrained
from hullspace.geometry import check_constraints
from hullspace.rem import (
    EmbeddingError,
    IncompleteSelectionError,
    build_embedding,
    build_rem_session,
    convex_hull,
    embed_2d,
    nearest_design,
)

CFG = RemConfig(pool_size=60, tsne_iterations=400)


def brute_force_hull(points):
    """O(n^3) hull oracle: (a, b) is a hull edge iff every other point lies
    strictly on one side; hull vertices are the endpoints of such edges."""
    pts = np.unique(np.asarray(points, float), axis=0)
    n = len(pts)
    vertices = set()
    for i in range(n):
        d = pts - pts[i]
        for j in range(n):
            if i == j:
                continue
            cross = d[:, 0] * d[j, 1] - d[j, 0] * d[:, 1]
            mask = np.ones(n, bool)
            mask[[i, j]] = False
            if np.all(cross[mask] > 0) or np.all(cross[mask] < 0):
                vertices.add(tuple(pts[i]))
                vertices.add(tuple(pts[j]))
    return vertices


class TestConvexHull:
    def test_square_with_centre(self):
        pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]])
        hull, degenerate = convex_hull(pts)
        assert not degenerate
        assert len(hull) == 4
        assert {tuple(p) for p in hull} == {(0, 0), (1, 0), (1, 1), (0, 1)}

    def test_counterclockwise_order(self):
        pts = np.random.default_rng(0).uniform(size=(50, 2))
        hull, _ = convex_hull(pts)
        area2 = sum(hull[i][0] * hull[(i + 1) % len(hull)][1]
                    - hull[(i + 1) % len(hull)][0] * hull[i][1]
                    for i in range(len(hull)))
        assert area2 > 0  # shoelace positive = counterclockwise

    def test_collinear_degenerate(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        hull, degenerate = convex_hull(pts)
        assert degenerate
        assert len(hull) == 2
        assert {tuple(p) for p in hull} == {(0.0, 0.0), (3.0, 3.0)}

    def test_collinear_boundary_points_excluded(self):
        pts = np.array([[0, 0], [2, 0], [1, 0], [2, 2], [0, 2], [1, 2]])
        hull, _ = convex_hull(pts)
        assert len(hull) == 4

    def test_against_brute_force(self):
        pts = np.random.default_rng(1).uniform(size=(1000, 2))
        hull, _ = convex_hull(pts)
        assert {tuple(p) for p in hull} == brute_force_hull(pts)


class TestEmbedding:
    def test_three_designs_triangle(self):
        pool = sample_constrained(3, seed=2)
        emb = build_embedding(pool, seed=2, config=CFG)
        assert emb.points.shape == (3, 2)
        assert len(emb.hull_polygon) in (2, 3)

    def test_too_few_designs(self):
        with pytest.raises(EmbeddingError):
            embed_2d(np.zeros((2, 20)), seed=1, config=CFG)

    def test_duplicate_latents_coincide(self):
        pool = sample_constrained(50, seed=3)
        latents = np.array([r.latent for r in pool])
        latents[7] = latents[3]
        pts = embed_2d(latents, seed=3, config=CFG)
        diameter = np.max(np.linalg.norm(pts[:, None] - pts[None, :], axis=-1))
        assert np.linalg.norm(pts[7] - pts[3]) < 0.01 * diameter

    def test_deterministic(self):
        pool = sample_constrained(40, seed=4)
        latents = np.array([r.latent for r in pool])
        assert np.array_equal(embed_2d(latents, seed=4, config=CFG),
                              embed_2d(latents, seed=4, config=CFG))

    def test_all_points_inside_hull(self):
        pool = sample_constrained(80, seed=5)
        emb = build_embedding(pool, seed=5, config=CFG)
        hull = emb.hull_polygon
        for p in emb.points:
            for i in range(len(hull)):
                a, b = hull[i], hull[(i + 1) % len(hull)]
                cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])
                assert cross >= -1e-9

    @pytest.mark.xfail(
        strict=True,
        reason="2-D embeddings of the near-isotropic 20-D feasible set cannot "
               "reach 60% 10-in-30 neighbour recall; measured ceiling is about "
               "0.45 (see decisions ledger)")
    def test_knn_preservation(self):
        pool = sample_constrained(500, seed=4)
        latents = np.array([r.latent for r in pool])
        pts = embed_2d(latents, seed=4)

        def neighbours(m, k):
            d = np.linalg.norm(m[:, None] - m[None, :], axis=-1)
            np.fill_diagonal(d, np.inf)
            return np.argsort(d, axis=1)[:, :k]

        latent_nn = neighbours(latents, 10)
        embed_nn = neighbours(pts, 30)
        for i in range(len(pool)):
            overlap = len(set(latent_nn[i]) & set(embed_nn[i]))
            assert overlap >= 6


@pytest.fixture(scope="module")
def lookup_session(shared_surrogate):
    return build_rem_session(seed=6, surrogate=shared_surrogate, config=CFG)


class TestNearestDesign:
    @pytest.fixture
    def session(self, lookup_session):
        return lookup_session

    def test_click_on_a_point(self, session):
        for i in (0, 10, 41):
            u, v = session.embedding.points[i]
            assert nearest_design(session.embedding, u, v) == session.pool[i].id

    def test_tie_breaks_to_lowest_id(self):
        from hullspace.rem import EmbeddingMap
        emb = EmbeddingMap(["d000005", "d000002"],
                           np.array([[0.0, 1.0], [0.0, -1.0]]),
                           np.zeros((0, 2)), True)
        assert nearest_design(emb, 0.0, 0.0) == "d000002"

    def test_matches_linear_scan(self, session):
        rng = np.random.default_rng(7)
        pts = session.embedding.points
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        for _ in range(100):
            u, v = rng.uniform(lo, hi)
            expected_idx = np.argmin((pts[:, 0] - u) ** 2 + (pts[:, 1] - v) ** 2)
            assert nearest_design(session.embedding, u, v) == session.pool[expected_idx].id


class TestRemSession:
    @pytest.fixture
    def session(self, shared_surrogate):
        return build_rem_session(seed=8, surrogate=shared_surrogate, config=CFG)

    def test_pool_feasible_against_oracle(self, session):
        for record in session.pool:
            assert check_constraints(record.dimensions).all_satisfied

    def test_deterministic_build(self, shared_surrogate):
        a = build_rem_session(seed=9, surrogate=shared_surrogate, config=CFG)
        b = build_rem_session(seed=9, surrogate=shared_surrogate, config=CFG)
        assert [r.id for r in a.pool] == [r.id for r in b.pool]
        assert all(np.array_equal(x.latent, y.latent) for x, y in zip(a.pool, b.pool))
        assert np.array_equal(a.embedding.points, b.embedding.points)

    def test_configurable_pool_size(self, shared_surrogate):
        small = build_rem_session(seed=10, surrogate=shared_surrogate,
                                  config=RemConfig(pool_size=25, tsne_iterations=300))
        assert len(small.pool) == 25

    def test_no_cw_until_evaluated(self, session):
        assert all(r.cw is None for r in session.pool)
        record = session.evaluate_on_demand(session.pool[4].id, timestamp=10)
        assert record.cw is not None and record.cw_source == "surrogate"

    def test_evaluation_cached_and_logged_once(self, session, shared_surrogate):
        design_id = session.pool[3].id
        first = session.evaluate_on_demand(design_id, timestamp=5)
        second = session.evaluate_on_demand(design_id, timestamp=9)
        assert session.model_calls == 1
        assert first.cw == second.cw
        assert first.cw == shared_surrogate.predict(session.pool[3].latent).mean
        assert sum(1 for e in session.log if e.kind == "evaluated") == 1

    def test_no_cw_without_prior_evaluation_event(self, session):
        session.evaluate_on_demand(session.pool[2].id, timestamp=3)
        session.evaluate_on_demand(session.pool[11].id, timestamp=7)
        evaluated_ids = {r.id for r in session.pool if r.cw_source != "unevaluated"}
        logged_ids = {e.payload["designId"] for e in session.log if e.kind == "evaluated"}
        assert evaluated_ids == logged_ids

    def test_slot_overwrite_logs_both_occupants(self, session):
        first, second = session.pool[0].id, session.pool[1].id
        session.select_preferred(2, first, "form", timestamp=10)
        session.select_preferred(2, second, "performance", timestamp=20)
        events = [e for e in session.log if e.kind == "selected"]
        assert events[0].payload["previous"] is None
        assert events[1].payload["previous"] == first
        assert session.slots[2].design_id == second

    def test_selection_rationale_validation(self, session):
        with pytest.raises(ValueError):
            session.select_preferred(1, session.pool[0].id, "whim", timestamp=1)
        with pytest.raises(ValueError):
            session.select_preferred(0, session.pool[0].id, "form", timestamp=1)

    def test_termination_requires_full_slots(self, session):
        for slot in range(1, 4):
            session.select_preferred(slot, session.pool[slot].id, "both", timestamp=slot)
        with pytest.raises(IncompleteSelectionError):
            session.terminate(timestamp=99)
        for slot in (4, 5):
            session.select_preferred(slot, session.pool[slot].id, "both", timestamp=slot)
        session.terminate(timestamp=100)
        assert session.terminated

    def test_replay_reproduces_state(self, session):
        session.evaluate_on_demand(session.pool[6].id, timestamp=2)
        for slot in range(1, 6):
            session.select_preferred(slot, session.pool[slot].id, "form", timestamp=slot * 10)
        session.terminate(timestamp=60)
        rebuilt = build_rem_session(seed=8, surrogate=None, config=CFG)
        rebuilt.log = EventLog()
        rebuilt.replay(EventLog.from_jsonl(session.log.to_jsonl()))
        assert rebuilt.summary() == session.summary()

    def test_embedding_csv_export(self, session):
        lines = session.embedding.to_csv().splitlines()
        assert lines[0] == "designId,u,v"
        assert len(lines) == len(session.pool) + 1
