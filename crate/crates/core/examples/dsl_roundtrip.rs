//! Parse an experiment description, print it back in canonical form and
//! list its sweep points.
//!
//! ```text
//! cargo run --example dsl_roundtrip -- crates/core/experiments/dw_idw.zpf
//! ```

use zpf_optics::dsl::{builtin_source, print, BUILTIN_NAMES};
use zpf_optics::{expand_sweeps, parse_str};

fn main() -> zpf_optics::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => builtin_source("dc")?.to_string(),
    };
    let spec = match parse_str(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let canonical = print(&spec);
    println!("{canonical}");
    assert_eq!(parse_str(&canonical)?, spec);
    let points = expand_sweeps(&spec);
    println!("{} sweep point(s); first: {:?}", points.len(), points[0].assignments);
    println!("builtins: {}", BUILTIN_NAMES.join(", "));

    let broken = "experiment \"x\"\nmode a\nsource vacuum -> a\nelement bs(a, q)\n";
    println!("error example: {}", parse_str(broken).unwrap_err());
    Ok(())
}
