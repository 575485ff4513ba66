pub mod actuarial;
pub mod bounds;
pub mod catalog;
pub mod error;
pub mod identities;
pub mod interp;
pub mod levy;
pub mod mc;
pub mod quadrature;
pub mod special;
pub mod task;
pub mod testfn;
