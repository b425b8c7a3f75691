//! Optional TOML config file: flat keys named like the long flags
//! (`link`, `beta0`, `beta1`, `alpha`, `offset`, `c`, `eta-low`).
//! Values from the file fill options the command line left unset.

use crate::exit::CliError;
use crate::ModelOpts;

pub fn apply_file(opts: &mut ModelOpts) -> Result<(), CliError> {
    let Some(path) = opts.config.clone() else {
        return Ok(());
    };
    let text = std::fs::read_to_string(&path).map_err(CliError::io)?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::usage(format!("bad config file {}: {e}", path.display())))?;

    let num = |key: &str| -> Result<Option<f64>, CliError> {
        match table.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_float()
                .or_else(|| v.as_integer().map(|i| i as f64))
                .map(Some)
                .ok_or_else(|| CliError::usage(format!("config key {key} must be a number"))),
        }
    };

    if opts.link.is_none() {
        if let Some(v) = table.get("link") {
            opts.link = Some(
                v.as_str()
                    .ok_or_else(|| CliError::usage("config key link must be a string"))?
                    .to_string(),
            );
        }
    }
    if opts.beta0.is_none() {
        opts.beta0 = num("beta0")?;
    }
    if opts.beta1.is_none() {
        opts.beta1 = num("beta1")?;
    }
    if opts.alpha.is_none() {
        opts.alpha = num("alpha")?;
    }
    if opts.c.is_none() {
        opts.c = num("c")?;
    }
    if opts.eta_low.is_none() {
        opts.eta_low = num("eta-low")?;
    }
    if !opts.offset {
        if let Some(v) = table.get("offset") {
            opts.offset = v
                .as_bool()
                .ok_or_else(|| CliError::usage("config key offset must be a boolean"))?;
        }
    }
    Ok(())
}
