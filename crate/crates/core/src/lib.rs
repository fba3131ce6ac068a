pub mod blockop;
pub mod error;
pub mod linalg;
pub mod models;
pub mod nep;
pub mod pseudoinv;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::Mat;
pub use report::{MethodTag, SpectralReport};
pub use scalar::{Real, C};

pub type Mat64 = Mat<f64>;
pub type Mat32 = Mat<f32>;
pub type C64 = C<f64>;
pub type C32 = C<f32>;
