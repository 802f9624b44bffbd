//! Exact finite-precision constructions for the explicit Jacquet-Langlands
//! correspondence of totally wildly ramified representations of `GL_n` over
//! `Q_p`, with `n` a power of `p`.

pub mod algebra;
pub mod arith;
pub mod cli;
pub mod extension;
pub mod inner_form;
pub mod strata;
pub mod symplectic;
pub mod trace;
pub mod transfer;
