//! Configuration files: partial overlays, full echo, typo rejection.
//!
//! A config file only states what differs from the built-in facility
//! parameters; everything else keeps its default. The effective, fully
//! resolved configuration is echoed back (and published with every run as
//! effective_config.toml). Unknown keys and out-of-range values are
//! rejected with the offending path.
//!
//!     cargo run --example custom_configuration

use phc_divert::experiment::{effective_toml, parse_toml_config};

fn main() {
    let overlay = r#"
        travel_time = 90
        replications = 4
        seed = 7

        [phc1]
        ia_childbirth = 960
        n_ipd_beds = 8

        [phc2.labour_service]
        kind = "uniform"
        min = 300
        max = 650
    "#;
    let cfg = parse_toml_config(overlay).expect("valid overlay");
    println!(
        "overlaid: travel {} min, {} replications, phc1 childbirth every {} min, phc2 labour {:?}",
        cfg.travel_time,
        cfg.replications,
        cfg.phc1.ia_childbirth.unwrap(),
        cfg.phc2.labour_service,
    );
    println!("\neffective configuration echoed back:\n");
    for line in effective_toml(&cfg).lines().take(14) {
        println!("  {line}");
    }
    println!("  ...");

    println!("\nmistakes are named, not guessed at:");
    for bad in [
        "travel_tiem = 90",                        // typo in a key
        "[phc1]\nia_childbirth = -10",             // out of range
        "[phc2.labour_service]\nkind = \"gamma\"", // unsupported shape
    ] {
        let err = parse_toml_config(bad)
            .err()
            .map_or_else(|| cfg_err(bad), |e| e.to_string());
        println!("  {:<40} -> {}", bad.replace('\n', " "), flatten(&err));
    }
}

fn cfg_err(overlay: &str) -> String {
    // Range errors surface on validate, not parse.
    let cfg = parse_toml_config(overlay).expect("parsed");
    cfg.validate().expect_err("invalid").to_string()
}

fn flatten(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
