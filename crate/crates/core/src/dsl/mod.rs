//! Line-oriented experiment description language.
//!
//! ```text
//! experiment "dc"
//! param phi = sweep(0, 360, 15) deg
//! mode a, b
//! source laser(alpha=0.1) -> a
//! source vacuum -> b
//! element bs(a, b)
//! element phase(a, phi=phi)
//! detector D1 on a
//! detector D2 on b
//! postselect click(D1) & noclick(D2)
//! ```

mod builtins;
mod lexer;
mod parser;
mod printer;
mod spec;
mod sweep;

pub use builtins::{builtin, builtin_source, BUILTIN_NAMES};
pub use lexer::{tokenize, Token, TokenKind, Unit};
pub use parser::{parse, parse_str};
pub use printer::print;
pub use spec::{
    DetectorDecl, ElementDecl, ElementKind, ExperimentSpec, ParamDecl, ParamValue, SourceDecl, SourceKind,
    SweepRange, Value, WitnessDecl, WitnessKind, DEFAULT_TRIALS,
};
pub use sweep::{expand_sweeps, SweepPoint};
