"""Category identification from preference and value oracles."""

from __future__ import annotations

import numpy as np
import pytest

from ctm.core import BOUNDARY, Box
from ctm.errors import PreconditionError, ThresholdError
from ctm.identify import (AMBIGUOUS_LABEL, BOUNDARY_LABEL, AmbiguityModel, Grid, RegionMap,
                          candidates_from_model, identify_bgs, identify_by_discontinuity,
                          identify_local, label_by_jumps, label_regions, lis_match,
                          model_oracle, ray_directions, value_oracle)
from ctm.models import bgs, mo, neoclassical


def _gap_band(catfn, r, width):
    return lambda p: abs(catfn.gap(p, r)) > width


class TestGrid:
    def test_points_and_spacing(self):
        grid = Grid(Box(0.0, 0.0, 2.0, 1.0), 5, 3)
        pts = list(grid.points())
        assert len(pts) == grid.size == 15
        assert pts[0] == (0, 0, (0.0, 0.0)) and pts[-1] == (2, 4, (2.0, 1.0))
        assert grid.spacing == 0.5
        assert grid.cell_of((1.0, 0.5)) == (1, 2)
        assert grid.cell_of((5.0, 0.5)) is None

    def test_too_small(self):
        with pytest.raises(ValueError):
            Grid(Box.square(0, 1), 1, 5)


class TestLocalIdentification:
    model = bgs(0.6)
    r = (2.0, 2.0)
    grid = Grid(Box.square(0.5, 5.0), 24, 24)

    def test_bgs_method_matches_truth(self):
        found = identify_bgs(model_oracle(self.model), self.r, self.grid)
        catfn = self.model.catfn
        acc, n = found.accuracy(lambda p: catfn._classify(p, self.r),
                                include=_gap_band(catfn, self.r, 0.05))
        assert n > 300 and acc == 1.0

    def test_local_and_bgs_methods_agree(self):
        oracle = model_oracle(self.model)
        a = identify_local(oracle, self.r, self.grid, candidates_from_model(self.model, self.r))
        b = identify_bgs(oracle, self.r, self.grid)
        band = _gap_band(self.model.catfn, self.r, 0.05)
        off = np.zeros((self.grid.ny, self.grid.nx), dtype=bool)
        for iy, ix, p in self.grid.points():
            off[iy, ix] = band(p)
        assert off.sum() > 300
        assert np.array_equal(a.labels[off], b.labels[off])

    def test_stable_under_probe_halving(self):
        oracle = model_oracle(self.model)
        cands = candidates_from_model(self.model, self.r)
        a = identify_local(oracle, self.r, self.grid, cands, probe_radius=0.004)
        b = identify_local(oracle, self.r, self.grid, cands, probe_radius=0.002)
        catfn = self.model.catfn
        for iy, ix, p in self.grid.points():
            if a.label(iy, ix) != b.label(iy, ix):
                assert catfn.frontier_distance(p, self.r) <= self.grid.spacing

    def test_equal_weights_are_ambiguous(self):
        model = bgs(0.5)
        grid = Grid(Box.square(0.5, 5.0), 8, 8)
        found = identify_local(model_oracle(model), self.r, grid,
                               candidates_from_model(model, self.r))
        for iy, ix, p in grid.points():
            want = BOUNDARY_LABEL if abs(p[0] - p[1]) < 1e-9 else AMBIGUOUS_LABEL
            assert found.label(iy, ix) == want

    def test_point_on_the_frontier_is_boundary(self):
        grid = Grid(Box(2.0, 2.0, 3.0, 3.0), 2, 2)
        found = identify_bgs(model_oracle(self.model), self.r, grid)
        assert found.label(0, 0) == BOUNDARY_LABEL
        assert found.label(1, 1) == BOUNDARY_LABEL

    def test_single_category(self):
        model = neoclassical(box=Box.square(0.5, 5.0))
        found = identify_local(model_oracle(model), self.r, self.grid,
                               candidates_from_model(model, self.r))
        assert found.counts() == {1: self.grid.size}

    def test_ambiguity_model_is_ambiguous(self):
        model = AmbiguityModel()
        r = (1.0, 1.0)
        grid = Grid(model.box, 20, 20)
        found = identify_local(model_oracle(model), r, grid, candidates_from_model(model, r))
        low = [found.label(iy, ix) for iy, ix, p in grid.points()
               if p[0] + p[1] < 0.95 and abs(p[0] - p[1]) > 0.05]
        assert low and all(v == AMBIGUOUS_LABEL for v in low)
        # both utilities depend on x1 + x2 alone, so indifference sets never separate them
        assert set(found.counts()) <= {AMBIGUOUS_LABEL, BOUNDARY_LABEL}
        u = candidates_from_model(model, r)
        assert u[0]((0.3, 0.4)) == u[1]((0.3, 0.4))
        assert u[0]((0.9, 0.8)) != u[1]((0.9, 0.8))

    def test_probe_radius_checked(self):
        with pytest.raises(PreconditionError):
            identify_bgs(model_oracle(self.model), self.r, self.grid, probe_radius=self.grid.spacing)
        with pytest.raises(PreconditionError):
            identify_bgs(model_oracle(self.model), self.r, self.grid, probe_radius=0.0)

    def test_lis_match(self):
        assert lis_match((1.0, -2.0), (1.00001, -2.00001))
        assert not lis_match((1.0,), (1.0, 2.0))
        assert not lis_match(None, (1.0,))


class TestDiscontinuity:
    def test_smooth_models_have_no_frontier(self):
        for model in (neoclassical(box=Box.square(0.5, 5.0)), mo(0.0)):
            found = identify_by_discontinuity(value_oracle(model), (2.0, 2.0), ray_directions(32),
                                              0.02, model.box, origin=(1.0, 1.0))
            assert found == []

    def test_require_boundary(self):
        model = mo(0.0)
        with pytest.raises(ThresholdError):
            identify_by_discontinuity(value_oracle(model), (2.0, 2.0), ray_directions(8), 0.05,
                                      model.box, origin=(1.0, 1.0), require_boundary=True)

    def test_bad_arguments(self):
        model = mo()
        with pytest.raises(ValueError):
            identify_by_discontinuity(value_oracle(model), (2, 2), ray_directions(4), 0.0, model.box)
        with pytest.raises(ValueError):
            identify_by_discontinuity(value_oracle(model), (2, 2), [(0.0, 0.0)], 0.1, model.box)

    def test_label_by_jumps_splits_the_frontier(self):
        model = mo(1.0)
        r = (2.0, 2.0)
        grid = Grid(model.box, 20, 20)
        found = label_by_jumps(value_oracle(model), r, grid, 0.02, origin=(1.0, 1.0))
        level = r[0] / 2 + r[1]
        truth = lambda p: 1 if p[0] / 2 + p[1] < level else 2
        acc, n = found.accuracy(truth, include=lambda p: abs(p[0] / 2 + p[1] - level) > 0.05)
        assert n > 300 and acc == 1.0

    def test_label_regions_floods_between_walls(self):
        grid = Grid(Box.square(0.0, 1.0), 11, 11)
        wall = [(0.5, y / 10) for y in range(11)]
        found = label_regions(wall, grid, (0.5, 0.5))
        assert found.label(5, 0) != found.label(5, 10)
        assert found.label(5, 5) == 0


class TestRegionMap:
    def test_round_trip(self):
        grid = Grid(Box(0.0, 1.0, 2.0, 3.0), 3, 2)
        labels = np.array([[1, 2, 0], [-1, 1, 2]])
        region = RegionMap(grid, labels, (0.5, 1.5), "bgs")
        back = RegionMap.from_dict(region.to_dict())
        assert back.grid == grid and back.method == "bgs" and back.reference == (0.5, 1.5)
        assert np.array_equal(back.labels, labels)

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            RegionMap(Grid(Box.square(0, 1), 3, 3), np.zeros((2, 3), dtype=int), (0, 0))

    def test_accuracy_ignores_categories(self):
        grid = Grid(Box.square(0, 1), 2, 2)
        region = RegionMap(grid, np.array([[1, 1], [2, -1]]), (0, 0))
        acc, n = region.accuracy(lambda p: 1 if p[1] < 0.5 else 2, ignore=(BOUNDARY,))
        assert (acc, n) == (0.75, 4)
        acc, n = region.accuracy(lambda p: 1 if p[1] < 0.5 else 2, ignore=(2,))
        assert (acc, n) == (1.0, 2)
