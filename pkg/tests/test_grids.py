import numpy as np
import pytest

from anilap.errors import InvalidQuery, SupportViolation
from anilap.geometry import rect
from anilap.grids import (BoxData, CallableData, Constant, ExteriorSum,
                          GridFunction, TensorGrid, Zero, as_exterior,
                          axis_bump, half_line, require_supported_inside)


def test_for_rect_forces_odd_and_centers(aniso):
    interior = rect(aniso, (0.25, -0.5), 1.0)
    g = TensorGrid.for_rect(aniso, interior, 32, pad_cells=4)
    assert g.interior_shape == (33, 33)  # even request rounds up to odd
    assert g.window_shape == (41, 41)
    # a node sits exactly at the interior center on every axis
    for a, c in zip(g.axes, interior.center):
        assert np.min(np.abs(a - c)) < 1e-14
    for k in range(2):
        assert g.h[k] == pytest.approx(2.0 * interior.half_widths[k] / 33)


def test_for_rect_pad_in_coordinates(aniso):
    interior = rect(aniso, (0.0, 0.0), 1.0)
    g = TensorGrid.for_rect(aniso, interior, 11, pad=(0.3, 0.05))
    # padding is ceil(pad / h) whole cells per side
    for k, pad in enumerate((0.3, 0.05)):
        ext = g.int_slices[k].start
        assert ext == int(np.ceil(pad / g.h[k]))
        assert g.window_shape[k] == 11 + 2 * ext


def test_interior_view_and_mask(grid):
    vals = np.arange(np.prod(grid.window_shape), dtype=float)
    vals = vals.reshape(grid.window_shape)
    mask = grid.interior_mask()
    assert mask.sum() == np.prod(grid.interior_shape)
    assert np.array_equal(grid.interior_view(vals), vals[mask].reshape(grid.interior_shape))


def test_window_bounds_extend_half_cell(grid):
    for (lo, hi), a, h in zip(grid.window_bounds(), grid.axes, grid.h):
        assert lo == pytest.approx(a[0] - h / 2.0)
        assert hi == pytest.approx(a[-1] + h / 2.0)


def test_slices_for_strict_interior(aniso, grid):
    sub = rect(aniso, (0.0, 0.0), 0.5)
    sl = grid.slices_for(sub)
    pts = grid.mesh(sl).reshape(-1, 2)
    assert np.all(sub.contains(pts))
    # nodes just outside the slices are not strictly inside
    embedded = grid.embed(np.ones(tuple(s.stop - s.start for s in sl)), sl)
    outside = grid.mesh().reshape(-1, 2)[embedded.ravel() == 0.0]
    lo = np.array([b[0] for b in sub.bounds()])
    hi = np.array([b[1] for b in sub.bounds()])
    assert not np.any(np.all((outside > lo) & (outside < hi), axis=1))


def test_periodic_cell_layout(aniso):
    g = TensorGrid.periodic_cell(aniso, ((0.0, 2.0), (-1.0, 1.0)), 8)
    assert g.periodic
    assert g.window_shape == (8, 8)
    assert g.interior_shape == (8, 8)  # no exterior on periodic grids
    # cell-centered nodes: first node half a cell in
    assert g.axes[0][0] == pytest.approx(0.0 + 0.125)
    assert g.axes[1][-1] == pytest.approx(1.0 - 0.125)


def test_grid_function_shape_check(grid):
    with pytest.raises(ValueError):
        GridFunction(grid, np.zeros((3, 3)))
    u = GridFunction(grid, np.zeros(grid.window_shape))
    assert isinstance(u.exterior, Zero)
    assert u.interior_values.shape == grid.interior_shape


def test_from_callable_vectorized_and_scalar(grid):
    fn_vec = lambda x: np.sin(x[..., 0]) * np.cos(x[..., 1])
    fn_scalar = lambda x: float(np.sin(x[0]) * np.cos(x[1]))
    a = GridFunction.from_callable(grid, fn_vec)
    b = GridFunction.from_callable(grid, fn_scalar)
    assert np.allclose(a.values, b.values, rtol=0.0, atol=0.0)
    assert isinstance(a.exterior, CallableData)


def test_as_exterior_dispatch():
    assert isinstance(as_exterior("zero"), Zero)
    assert isinstance(as_exterior(None), Zero)
    const = as_exterior(("constant", 2.5))
    assert isinstance(const, Constant) and const.c == 2.5
    assert isinstance(as_exterior(lambda x: 0.0), CallableData)
    with pytest.raises(TypeError):
        as_exterior(12)


def test_box_data_indicator_and_fiber(kernel):
    box = BoxData([(1.0, 3.0), (-0.5, 0.5)], height=2.0)
    pts = np.array([[2.0, 0.0], [0.5, 0.0], [2.0, 0.7]])
    assert np.array_equal(box(pts), [2.0, 0.0, 0.0])
    x = np.zeros(2)
    # fiber along axis 0 from T=0.5: box spans [1, 3] beyond it
    got = box.fiber_tail(kernel, x, 0, +1, 0.5)
    exact = 2.0 * float(kernel.axis_cell_integral(0, 1.0, 3.0))
    assert got == pytest.approx(exact, rel=1e-12)
    # wrong side, or off the box in the cross axis: no mass
    assert box.fiber_tail(kernel, x, 0, -1, 0.5) == 0.0
    assert box.fiber_tail(kernel, np.array([0.0, 0.9]), 0, +1, 0.5) == 0.0
    # power=2 squares the height
    got2 = box.fiber_tail(kernel, x, 0, +1, 0.5, power=2)
    assert got2 == pytest.approx(2.0 * exact, rel=1e-12)


def test_half_infinite_box_uses_tail(kernel):
    hl = half_line(2, 0, 1.0)
    got = hl.fiber_tail(kernel, np.zeros(2), 0, +1, 0.25)
    assert got == pytest.approx(float(kernel.axis_tail_integral(0, 1.0)), rel=1e-12)
    # threshold behind the cut: the cut dominates
    got = hl.fiber_tail(kernel, np.zeros(2), 0, +1, 2.0)
    assert got == pytest.approx(float(kernel.axis_tail_integral(0, 2.0)), rel=1e-12)


def test_constant_data_tail(kernel):
    c = Constant(3.0)
    got = c.fiber_tail(kernel, np.zeros(2), 1, -1, 0.5, power=2)
    assert got == pytest.approx(9.0 * float(kernel.axis_tail_integral(1, 0.5)), rel=1e-12)
    assert c.range() == (3.0, 3.0)


def test_exterior_sum_disjoint(kernel):
    a = axis_bump(2, 0, 2.0, 1.0, height=1.0, thickness=0.5)
    b = axis_bump(2, 0, 5.0, 1.0, height=4.0, thickness=0.5)
    s = ExteriorSum([a, b])
    x = np.zeros(2)
    got = s.fiber_tail(kernel, x, 0, +1, 1.0)
    exact = float(kernel.axis_cell_integral(0, 2.0, 3.0)) \
        + 4.0 * float(kernel.axis_cell_integral(0, 5.0, 6.0))
    assert got == pytest.approx(exact, rel=1e-12)
    lo, hi = s.range()
    assert lo == 0.0 and hi == 4.0  # supports are bounded, so 0 is attained


def test_callable_tail_matches_closed_form(kernel):
    g = CallableData(lambda pts: np.ones(np.shape(pts)[:-1]))
    got = g.fiber_tail(kernel, np.zeros(2), 0, +1, 1.0)
    assert got == pytest.approx(float(kernel.axis_tail_integral(0, 1.0)), rel=1e-6)
    with pytest.raises(InvalidQuery):
        g.range()


def test_require_supported_inside(aniso, grid):
    region = rect(aniso, (0.0, 0.0), 0.5)
    sl = grid.slices_for(region)
    vals = grid.embed(np.ones(tuple(s.stop - s.start for s in sl)), sl)
    require_supported_inside(GridFunction(grid, vals), region)

    stray = vals.copy()
    stray[0, 0] = 1e-30  # any nonzero node outside the region trips the check
    with pytest.raises(SupportViolation):
        require_supported_inside(GridFunction(grid, stray), region)
    with pytest.raises(SupportViolation):
        require_supported_inside(
            GridFunction(grid, vals, exterior=("constant", 1.0)), region)
