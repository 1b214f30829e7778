//! Functor calculus: functor expressions, cross-effects, stabilization, derivatives, layers,
//! Taylor stages and the chain rule.

pub mod cross;
pub mod eval;
pub mod expr;
pub mod layer;
pub mod orbits;
pub mod stable;

pub use eval::{eval, fmap, Ctx, Evaluated, Morph, Value};
pub use expr::{Atom, Cat, FunctorExpr, Node};
pub use cross::{co_cross_effect, cross_cube, cross_effect, cross_map, cross_swap, CrossCube};
pub use stable::{canonical_point, derivative, stabilized_cross_effect, DerivativeResult, StabilizeOpts, Stabilized, StageRecord};
pub use orbits::{diagonal_tensor, homotopy_orbits, invariant_dims, orbits_averaging, orbits_bar, tensor_power};
pub use layer::{chain_rule_check, composition_betti, d_n_layer, sigma_inf, taylor_stage, ChainRuleReport, ChainRuleRow, LayerResult};
