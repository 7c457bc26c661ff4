use super::parser::parse_str;
use super::spec::ExperimentSpec;
use crate::error::DslError;

/// Delayed choice with weak coherent light. BS2 is present when `bs2 != 0`.
pub const DC: &str = r#"
experiment "dc"
config sigma0=0.7071067811865476, gamma=1.95
param alpha = 0.1
param theta = [0, 30, 45] deg
param phi = sweep(0, 360, 15) deg
param bs2 = 1
mode a, b
source laser(alpha=alpha) -> a
source vacuum -> b
element bs(a, b)
element hwp(a, theta=theta)
element phase(a, phi=phi)
element mirror_swap(a, b)
element bs(a, b) when bs2
element polarizer(a, psi=0)
element polarizer(b, psi=0)
detector D1 on a
detector D2 on b
postselect click(D1) & noclick(D2)
trials 1e6
"#;

/// Quantum eraser: one beam of an entangled pair enters the interferometer,
/// its partner passes a diagonal polarizer before D3.
pub const ERASER: &str = r#"
experiment "eraser"
config sigma0=0.7071067811865476, gamma=1.95
param r = 1
param theta = 45 deg
param phi = sweep(0, 360, 15) deg
param bs2 = 1
mode a, b, c
source entangled(r=r) -> a, c
source vacuum -> b
element bs(a, b)
element hwp(a, theta=theta)
element phase(a, phi=phi)
element mirror_swap(a, b)
element bs(a, b) when bs2
element polarizer(a, psi=0)
element polarizer(b, psi=0)
element polarizer(c, psi=45 deg)
detector D1 on a
detector D2 on b
detector D3 on c
condition on click(D3)
postselect click(D1) & noclick(D2)
trials 1e6
"#;

/// Quantum-controlled delayed choice with a polarization-dependent beam
/// splitter. The interferometer output read by D1/D2 leaves the PDBS on
/// mode `b`; D3/D4 read mode `a`; D5/D6 read the control beam `c`.
pub const PDBS: &str = r#"
experiment "pdbs"
config sigma0=0.7071067811865476, gamma=1.95
param r = 0.25
param theta = sweep(0, 45, 11.25) deg
param phi = sweep(0, 360, 45) deg
mode a, b, c, pa, pb, pc
source entangled(r=r) -> a, c
source vacuum -> b
source vacuum -> pa, pb, pc
element bs(a, b)
element phase(a, phi=phi)
element pdbs(b, a)
element hwp(b, theta=22.5 deg)
element hwp(a, theta=22.5 deg)
element hwp(c, theta=theta)
element pbs(b, pb)
element pbs(a, pa)
element pbs(c, pc)
detector D1 on b
detector D2 on pb
detector D3 on a
detector D4 on pa
detector D5 on c
detector D6 on pc
condition on (click(D1) & noclick(D2) & noclick(D3) & noclick(D4) | noclick(D1) & click(D2) & noclick(D3) & noclick(D4) | noclick(D1) & noclick(D2) & click(D3) & noclick(D4) | noclick(D1) & noclick(D2) & noclick(D3) & click(D4)) & noclick(D5) & click(D6)
postselect click(D1) | click(D2)
trials 5e6
"#;

/// Prepare-and-measure dimension witness with a polarization Mach-Zehnder.
pub const DW: &str = r#"
experiment "dw"
config sigma0=0.7071067811865476, gamma=1.95
param alpha2 = 1.3
param phix = [0, 180, -90, 90] deg
param sigy = [0, 90] deg
mode a, p
source laser(alpha2=alpha2) -> a
source vacuum -> p
element hwp(a, theta=22.5 deg)
element phase(a, phi=phix, axis=v)
element phase(a, phi=sigy, axis=v)
element hwp(a, theta=22.5 deg)
element pbs(a, p)
detector D1 on a
detector D2 on p
condition on click(D1) & noclick(D2) | noclick(D1) & click(D2)
postselect click(D1)
witness w2(phix, sigy)
trials 1e6
"#;

/// Entanglement-heralded dimension witness. Bob reads D1/D2, Alice heralds
/// with D3/D4.
pub const HERALD_DW: &str = r#"
experiment "herald-dw"
config sigma0=0.7071067811865476, gamma=1.95
param r = sweep(0.2, 3, 0.2)
param ax = [90, 45] deg
param by = [90, 0] deg
mode a, b, pa, pb
source entangled(r=r) -> a, b
source vacuum -> pa, pb
element phase(a, phi=ax, axis=v)
element hwp(a, theta=22.5 deg)
element phase(b, phi=by, axis=v)
element hwp(b, theta=22.5 deg)
element pbs(b, pb)
element pbs(a, pa)
detector D1 on b
detector D2 on pb
detector D3 on a
detector D4 on pa
condition on click(D1) & noclick(D2) & (click(D3) & noclick(D4) | noclick(D3) & click(D4))
postselect click(D3)
witness herald_idw(ax, by)
trials 1e6
"#;

pub const BUILTIN_NAMES: [&str; 5] = ["dc", "eraser", "pdbs", "dw", "herald-dw"];

pub fn builtin_source(name: &str) -> Result<&'static str, DslError> {
    Ok(match name {
        "dc" => DC,
        "eraser" => ERASER,
        "pdbs" => PDBS,
        "dw" => DW,
        "herald-dw" => HERALD_DW,
        _ => {
            return Err(DslError::UnknownBuiltin {
                name: name.to_string(),
                available: BUILTIN_NAMES.join(", "),
            })
        }
    })
}

/// One of the five preloaded experiments.
pub fn builtin(name: &str) -> Result<ExperimentSpec, DslError> {
    let spec = parse_str(builtin_source(name)?)?;
    Ok(spec)
}
