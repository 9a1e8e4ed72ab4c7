pub mod hermite;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod spline;
