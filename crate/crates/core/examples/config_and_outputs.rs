//! Load a TOML run configuration and write the plot-ready files of a
//! single instance into a temporary directory.

use scar_thermo::config::{Overrides, RunConfig};

const CONFIG: &str = r#"
n_sites = 8
base_seed = 5

[model]
kind = "xxz"
b = 0.5
J = 1.0
Delta = 0.9

[beta_search]
grid_points = 128
"#;

fn main() -> scar_thermo::Result<()> {
    let dir = std::env::temp_dir().join("scar-thermo-example");
    let mut config = RunConfig::from_toml_str(CONFIG)?;
    config.apply(&Overrides { out: Some(dir.clone()), ..Overrides::default() });
    config.validate()?;
    println!("config hash {}", config.hash()?);

    scar_thermo::cli::cmd_single(&config)?;
    for entry in std::fs::read_dir(&dir)? {
        let path = entry?.path();
        let lines = std::fs::read_to_string(&path)?.lines().count();
        println!("  {} ({lines} lines)", path.display());
    }

    let bad = RunConfig::from_toml_str("[beta_search]\ngrid_points = 8").and_then(|c| c.validate());
    println!("rejected: {}", bad.unwrap_err());
    Ok(())
}
