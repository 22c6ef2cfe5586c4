//! Bath spectral densities, correlation functions and Markovian coefficients.

mod coefficients;
mod correlation;
mod hilbert;
mod spectral;

pub use coefficients::{
    gamma_coefficient, gamma_matrix, kondo_rate, BathCoupling, GammaBlock, GammaMatrix, HalfFourierCoefficient,
    KondoBand, KondoParams, GAMMA_PSD_TOL,
};
pub use correlation::{
    correlation_function, gamma_time_dependent, gamma_time_dependent_series, half_fourier_of_kernel,
    CorrelationFunction, FrequencyGrid,
};
pub use hilbert::{hilbert_transform, HilbertTransform, HilbertValue};
pub use spectral::{fermi, LowFrequencyLaw, SpectralDensity};
