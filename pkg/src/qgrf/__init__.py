"""qgrf: transformed Gaussian random fields, quantum sampling, estimation.

The pipeline: a Gaussian random field is discretized as a sinc-interpolated
moving average over lattice white noise, pointwise-transformed into [-1, 1],
encoded into statevector amplitudes on the built-in simulator, and scalar
quantities of interest are estimated by shot sampling or maximum-likelihood
amplitude estimation.
"""

from .encoder import angle_width_for, build_amplitude_encoder
from .estimation import (
    EstimationConfig,
    ExactMode,
    MlaeMode,
    MomentRequest,
    ShotsMode,
    estimate_amplitude_mlae,
    estimate_amplitude_shots,
    estimate_moment,
    exact_amplitude,
    hoeffding_exponent,
)
from .fields import (
    Transformation,
    cosine_transform,
    discrete_covariance,
    evaluate_field,
    sigmoid_transform,
    transform_field,
    two_phase_transform,
)
from .grids import GridSpec, index_set, union_index_set
from .kernels import (
    ConvolutionKernel,
    CovarianceSpec,
    gaussian_kernel,
    sinc,
    sinc_complex_modulus,
)
from .moments import (
    build_mean_circuit,
    build_moment_circuit,
    classical_mean,
    classical_moment,
)
from .noise import (
    CltBits,
    OsRandom,
    PcgInverseCdf,
    SeededGauss,
    WhiteNoiseGrid,
    coarsen_noise,
    sample_noise,
)
from .prng import (
    PcgParams,
    default_params,
    derive_seed,
    inverse_cdf_sample,
    pcg_bit,
    pcg_state_at,
    pcg_word,
)
from .qoi import QoiWeights, build_phase_flip, build_state_prep
from .qpcg import build_quantum_pcg
from .qsim import Circuit, StateVector, amplitude, inverse, measure_shots, run
from .sampler import ClassicalSampler, SamplerConfig, build_sampler

__version__ = "0.1.0"
