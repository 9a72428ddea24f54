//! Exact, finite-depth model of the continuous surjection from
//! `σ₁(Γ)^ℕ` onto the ball `B(Γ) = {x ∈ [-1,1]^Γ : Σ|x_γ| ≤ 1}`, together with
//! a renorming of `ℓ_p(Γ)` whose ball fails a Ramsey-type dichotomy, and a
//! finite analyzer for that dichotomy.
//!
//! * [`dyadic`]: exact `k / 2^e` arithmetic.
//! * [`model`]: the spaces `B`, `B⁺`, `σ_k`, `Z₀`, `K(Z, Δ)` and `L₁`.
//! * [`maps`]: every map of the surjection, with sections and locality reports.
//! * [`norms`]: the graph norm `‖(x, y)‖′` and the families `U_α`, `V_α`.
//! * [`ramsey`]: homogeneous sets, monotone subsequences and scaling runs.

pub mod dyadic;
pub mod maps;
pub mod model;
pub mod norms;
pub mod ramsey;
pub mod seed;

pub use dyadic::Dyadic;
