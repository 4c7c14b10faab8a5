use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension n = {0} is outside the supported domain n >= 3")]
    Dimension(u32),

    #[error("quantization parameter m = {0} must be >= 1")]
    Quantization(u32),

    #[error("radius rho = {rho:e} is below the cutoff {cutoff:e}")]
    RadiusCutoff { rho: f64, cutoff: f64 },

    #[error("series evaluation rejected for xi = {xi} > {limit}")]
    SeriesRange { xi: f64, limit: f64 },

    #[error("evaluation at y = 0 with negative powers present")]
    SingularPoint,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range: {detail}")]
    Index { index: usize, detail: String },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("remainder underflowed to zero at m = {m}; shrink the m range")]
    Underflow { m: u32 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("point is not on the isotropic cone (|z.z|/|z|^2 = {residual:e})")]
    OffCone { residual: f64 },

    #[error("point too close to the cone vertex (|z| = {norm:e})")]
    NearVertex { norm: f64 },

    #[error("chart is degenerate (sine product {product:e})")]
    DegenerateChart { product: f64 },

    #[error("no solution in this chart: {0}")]
    NoSolution(String),

    #[error("angles undefined: {0}")]
    UndefinedAngle(String),

    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("sampler exhausted its retry budget of {0}")]
    RetryBudget(usize),

    #[error("expansion is not analytic at the origin: {0}")]
    NotAnalytic(String),
}

impl Error {
    /// Failures caused by arguments outside an operation's domain.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::Quantization(_)
                | Error::RadiusCutoff { .. }
                | Error::SeriesRange { .. }
                | Error::InvalidArgument(_)
                | Error::Index { .. }
                | Error::OffCone { .. }
                | Error::NearVertex { .. }
        )
    }

    /// Failures raised by numerical guards (underflow, degenerate fits, retries).
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::Underflow { .. }
                | Error::DegenerateFit(_)
                | Error::SingularPoint
                | Error::DegenerateChart { .. }
                | Error::NoSolution(_)
                | Error::UndefinedAngle(_)
                | Error::RetryBudget(_)
                | Error::NotAnalytic(_)
        )
    }
}
