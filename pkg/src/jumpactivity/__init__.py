"""Truncated power variation tests for finite and infinite jump activity in high-frequency data."""

from .moments import MomentTable, abs_normal_moment, joint_abs_moment, n_constant
from .pathseries import (
    SECOND,
    DataError,
    InvalidArgumentError,
    PathSeries,
    TruncationSpec,
    rate_exponents,
    truncated_power_variation,
)
from .statistics import (
    DegenerateSampleError,
    FiniteActivityTestConfig,
    InfiniteActivityTestConfig,
    TestReport,
    s_n,
    s_n_prime,
    test_finite_activity,
    test_infinite_activity,
    v_n,
    v_n_prime,
)

__version__ = "0.1.0"
