use alloc::string::String;

/// Errors reported by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("support function is not convex: h + h'' = {value:.3e} at theta = {theta:.6}")]
    ConvexityViolation { theta: f64, value: f64 },

    #[error("Gauss map is degenerate at theta = {theta:.6} (h + h'' = {value:.3e})")]
    DegenerateGaussMap { theta: f64, value: f64 },

    #[error("potential c/x^2 with c = {c} is singular inside ({a}, {b})")]
    SingularPotential { a: f64, b: f64, c: f64 },

    #[error("expected positive data, got {0}")]
    NonpositiveData(f64),

    #[error("origin lies inside the domain but the potential c/|x|^2 has c = {c} > 0")]
    OriginInsideDomain { c: f64 },

    #[error("origin is {distance:.4} from the domain; at least {required:.4} (5 grid spacings) is required")]
    OriginTooClose { distance: f64, required: f64 },

    #[error("grid too coarse: {interior} interior nodes, at least {required} required")]
    GridTooCoarse { interior: usize, required: usize },

    #[error("eigensolver did not converge after {iterations} iterations (worst relative residual {residual:.3e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("grid function has zero L2 norm")]
    ZeroFunction,

    #[error("s-function sampled on {got} directions, quadrature expects {expected}")]
    DataDirectionMismatch { expected: usize, got: usize },

    #[error("no descent direction found after {iterations} iterations")]
    NoDescent { iterations: usize },

    #[error("reconstructed support function is not convex (min h + h'' = {margin:.3e})")]
    NonConvexSupport { margin: f64 },

    #[error(
        "sample locus is not strictly convex: outward normals are not monotone near sample {index}"
    )]
    NonMonotoneNormals { index: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
