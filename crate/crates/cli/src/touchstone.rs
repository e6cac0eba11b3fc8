//! Touchstone v1 three-port files.

use stm_core::sparams::SMatrix;
use stm_core::Complex64;

use crate::error::CliError;
use crate::output::num;

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub freq_hz: Vec<f64>,
    pub s: Vec<SMatrix>,
    /// Reference impedance (ohm).
    pub r: f64,
}

/// `# Hz S RI R <r>`, one matrix row per line, rows in port order 1, 2, 3.
pub fn write(net: &Network) -> String {
    let mut out = String::from("! 3-port S-parameters, row i holds Si1 Si2 Si3\n");
    out.push_str(&format!("# Hz S RI R {}\n", net.r));
    for (f, m) in net.freq_hz.iter().zip(&net.s) {
        for i in 0..3 {
            let lead = if i == 0 { num(*f) } else { String::new() };
            let cells: Vec<String> = (0..3).map(|j| format!("{} {}", num(m[(i, j)].re), num(m[(i, j)].im))).collect();
            out.push_str(&format!("{lead:>24} {}\n", cells.join(" ")));
        }
    }
    out
}

pub fn parse(text: &str) -> Result<Network, CliError> {
    let mut scale = 1e9;
    let mut format = "MA".to_string();
    let mut r = 50.0;
    let mut seen_option = false;
    let mut values = Vec::new();
    for line in text.lines() {
        let line = line.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opt) = line.strip_prefix('#') {
            if seen_option {
                continue;
            }
            seen_option = true;
            let toks: Vec<String> = opt.split_whitespace().map(|t| t.to_ascii_uppercase()).collect();
            let mut i = 0;
            while i < toks.len() {
                match toks[i].as_str() {
                    "HZ" => scale = 1.0,
                    "KHZ" => scale = 1e3,
                    "MHZ" => scale = 1e6,
                    "GHZ" => scale = 1e9,
                    "S" => {}
                    "RI" | "MA" | "DB" => format = toks[i].clone(),
                    "R" => {
                        i += 1;
                        r = toks.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| bad("reference impedance"))?;
                    }
                    other => return Err(bad(&format!("unsupported option `{other}`"))),
                }
                i += 1;
            }
            continue;
        }
        for t in line.split_whitespace() {
            values.push(t.parse::<f64>().map_err(|_| bad(&format!("not a number: `{t}`")))?);
        }
    }
    if values.len() % 19 != 0 {
        return Err(bad("data is not a whole number of 3-port records"));
    }
    let mut net = Network { freq_hz: Vec::new(), s: Vec::new(), r };
    for rec in values.chunks(19) {
        net.freq_hz.push(rec[0] * scale);
        net.s.push(SMatrix::from_fn(|i, j| {
            let (a, b) = (rec[1 + 2 * (3 * i + j)], rec[2 + 2 * (3 * i + j)]);
            match format.as_str() {
                "RI" => Complex64::new(a, b),
                "MA" => Complex64::from_polar(a, b.to_radians()),
                _ => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
            }
        }));
    }
    Ok(net)
}

fn bad(what: &str) -> CliError {
    CliError::Parse(format!("touchstone: {what}"))
}
