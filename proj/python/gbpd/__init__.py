"""Generalised balanced power diagrams: construction, sections and rendering."""

from ._core import (
    GbpdError,
    Generator,
    GeneratorSet,
    GridSpec,
    bounding_box,
    box_ellipsoid_ratio,
    dist,
    distort,
    ellipsoid_volume,
    load_generator_set,
    mean_n1,
    mean_nR,
    mean_total,
    nearest_generator,
    normalize_nonnegative,
    optimal_n1,
    optimal_n1_completed,
    render_brute_force,
    render_improved,
    render_section_improved,
    rotate,
    sample_generators,
    save_generator_set,
    scale,
    scale_weights,
    section_set,
    shift_weights,
    solve_t_for_n1,
    translate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
