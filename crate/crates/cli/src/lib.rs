//! Library surface of the pipeline tool, shared by the binary and the
//! integration tests.

pub mod io;
pub mod pipeline;
