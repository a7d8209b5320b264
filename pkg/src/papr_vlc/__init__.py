"""Upper and lower PAPR of real-valued VLC-OFDM signals.

Signal synthesis, peak statistics, closed-form distributions under the
i.i.d. Gaussian sample model, and the LED scaling/biasing front end.
"""

__version__ = "0.1.0"

from .analytic import (  # noqa: E402
    JointEvalConfig, NormalKernel, ccdf_lpapr, ccdf_papr_complex, ccdf_papr_real,
    ccdf_upapr, joint_cdf, joint_pdf, required_backoff, symbol_variant_variance,
    violation_probability,
)
from .ofdm_signal import (  # noqa: E402
    ConstellationSpec, FrequencyFrame, TimeSymbol, batch_generate, idft,
    make_constellation, random_frame,
)
from .papr_stats import (  # noqa: E402
    CcdfCurve, PeakTriple, ccdf_std_error, complex_papr, empirical_ccdf, peak_triple,
)
from .rng import RandomStream  # noqa: E402
from .scaling_bias import (  # noqa: E402
    BiasScalePlan, DriveSymbol, greatest_alpha, scale_and_bias, variance_mc,
    violation_rate_mc,
)
