//! Angle literals: plain radians (`0.3927`) or multiples of π (`pi/8`,
//! `3pi/16`, `3*pi/16`, `-pi/4`, `π/8`).

use std::f64::consts::PI;

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let text = s.trim().replace('π', "pi").to_ascii_lowercase();
    let value = match text.split_once("pi") {
        None => text
            .parse::<f64>()
            .map_err(|_| format!("invalid angle {s:?}"))?,
        Some((coef, rest)) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c
                    .parse::<f64>()
                    .map_err(|_| format!("invalid angle {s:?}"))?,
            };
            let rest = rest.trim();
            let d = match rest.strip_prefix('/') {
                Some(d) => d
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| format!("invalid angle {s:?}"))?,
                None if rest.is_empty() => 1.0,
                None => return Err(format!("invalid angle {s:?}")),
            };
            k * PI / d
        }
    };
    if !value.is_finite() {
        return Err(format!("angle {s:?} is not finite"));
    }
    Ok(value)
}

/// Either `start:stop:count` (inclusive, evenly spaced) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (parse_angle(start)?, parse_angle(stop)?);
            let n: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("invalid grid count {count:?}"))?;
            match n {
                0 => Err("grid count must be at least 1".into()),
                1 => Ok(vec![a]),
                _ => Ok((0..n)
                    .map(|k| {
                        if k == n - 1 {
                            b
                        } else {
                            a + (b - a) * k as f64 / (n - 1) as f64
                        }
                    })
                    .collect()),
            }
        }
        [list] => list.split(',').map(parse_angle).collect(),
        _ => Err(format!(
            "invalid grid {s:?}; expected start:stop:count or a comma list"
        )),
    }
}
