"""Randomized no-three-in-line sets on dyadic shells.

The pipeline: sample a random window with per-shell inclusion
probabilities (sampling), count and locate collinear triples exactly
(geom, triples), repair the sample by deleting the largest member of
every triple (construct), and compare the outcome against exact
expectation/variance bounds and Monte Carlo moments (analytics,
experiments).  The cli module wraps the pipeline for batch use.
"""

from .analytics import (
    LineWeightReport,
    TrialStatistics,
    VarianceBoundReport,
    WeightRatioReport,
    beta,
    beta_box_grid,
    enumerate_box_lines,
    line_weight,
    line_weight_excluding,
    monte_carlo_moments,
    variance_bounds,
    weight_ratio_report,
    weight_sums,
)
from .construct import (
    delete_max_of_triples,
    density_profile,
    greedy_construct,
    modular_parabola,
)
from .experiments import (
    TrialManifest,
    TrialOutcome,
    TrialRunResult,
    density_box_sides,
    lemma_report,
    lemma_report_csv,
    run_trials,
    verify_theorem,
)
from .geom import (
    LatticeLine,
    canonical_direction,
    collinear,
    first_shell,
    inf_norm,
    line_points_in_box,
    line_points_in_rect,
    line_through,
    lines_meeting_shell,
    norm_lex_key,
    primitive_directions_with_norm,
    shell_index,
    shell_size,
)
from .sampling import (
    PointSet,
    SamplerConfig,
    expected_shell_count,
    inclusion_probability,
    point_uniform,
    read_pointset,
    sample_window,
    shell_counts,
    shell_probability,
    write_pointset,
)
from .triples import (
    count_collinear_triples,
    count_collinear_triples_bruteforce,
    enumerate_collinear_triples,
    prefix_triple_counts,
    triples_within_box,
)

__version__ = "0.1.0"
