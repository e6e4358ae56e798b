use crate::output::CliError;

/// Parses `lo:hi:step` into `lo + i·step`, including `hi` when the last
/// point lands within half a step of it. A bare number is a one-point grid.
pub fn parse_mass_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        CliError::param(format!(
            "mass grid must be `lo:hi:step` or a number, got `{text}`"
        ))
    };
    let nums = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = match nums[..] {
        [m] => vec![m],
        [lo, hi, step] => {
            if !(step > 0.0 && step.is_finite() && lo.is_finite() && hi >= lo) {
                return Err(CliError::param(format!(
                    "mass grid needs finite lo <= hi and step > 0, got `{text}`"
                )));
            }
            let n = ((hi - lo) / step + 0.5).floor();
            if n > 1e6 {
                return Err(CliError::param("mass grid has more than a million points"));
            }
            let places = text
                .split(':')
                .map(decimals)
                .collect::<Option<Vec<_>>>()
                .and_then(|d| d.into_iter().max());
            (0..=n as usize)
                .map(|i| {
                    let m = lo + i as f64 * step;
                    places.map_or(m, |d| round_to(m, d))
                })
                .collect()
        }
        _ => return Err(bad()),
    };
    if grid.iter().any(|&m| !(m > 0.0)) {
        return Err(CliError::param("masses must be positive"));
    }
    Ok(grid)
}

/// Decimal places of a plain decimal literal; `None` for exponent notation.
fn decimals(literal: &str) -> Option<i32> {
    let t = literal.trim();
    if t.contains(['e', 'E']) {
        return None;
    }
    Some(t.split_once('.').map_or(0, |(_, f)| f.len() as i32))
}

/// Snaps `lo + i·step` back onto the decimal grid the user typed.
fn round_to(x: f64, places: i32) -> f64 {
    if places > 15 {
        return x;
    }
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_within_half_step() {
        let g = parse_mass_grid("3.4:3.6:0.01").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[1], 3.41);
        assert_eq!(g[20], 3.6);
        assert_eq!(parse_mass_grid("1:2:0.3").unwrap().len(), 4);
        // 1 + 4·0.3 = 2.2 overshoots by less than half a step
        assert_eq!(parse_mass_grid("1:2.1:0.3").unwrap().len(), 5);
        assert_eq!(parse_mass_grid("2.5").unwrap(), vec![2.5]);
        assert_eq!(parse_mass_grid("1e-1:3e-1:1e-1").unwrap()[2], 0.1 + 2.0 * 0.1);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1:2", "1:2:0", "2:1:0.1", "a:b:c", "0:1:0.5", "-1", "1:2:3:4"] {
            let e = parse_mass_grid(bad).unwrap_err();
            assert_eq!(e.code, 2, "{bad}");
        }
    }
}
