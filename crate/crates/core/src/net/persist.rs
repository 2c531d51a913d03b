//! Plain-text model files.
//!
//! ```text
//! wnn-model v1 layers=6,5,1 activation=tanh
//! layer 1 weights <30 values, row-major>
//! layer 1 biases <5 values>
//! layer 2 weights <5 values>
//! layer 2 biases <1 value>
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fmt::Write as _;

use super::{NetError, Network};

pub const MODEL_MAGIC: &str = "wnn-model v1";

pub fn save_model(net: &Network) -> String {
    let sizes: Vec<String> = net.layer_sizes().iter().map(usize::to_string).collect();
    let mut out = format!("{MODEL_MAGIC} layers={} activation=tanh\n", sizes.join(","));
    for k in 0..net.layer_count() {
        let (weights, biases) = net.layer(k).expect("layer index in range");
        for (kind, values) in [("weights", weights), ("biases", biases)] {
            write!(out, "layer {} {kind}", k + 1).unwrap();
            for v in values {
                write!(out, " {v:.16e}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn load_model(text: &str) -> Result<Network, NetError> {
    let parse_err = |line: usize, message: String| NetError::Parse { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty model file".into()))?;
    let rest = header
        .strip_prefix(MODEL_MAGIC)
        .ok_or_else(|| parse_err(header_no, format!("expected header starting with `{MODEL_MAGIC}`")))?;
    let mut sizes = None;
    let mut activation = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("layers", v)) => {
                let parsed: Result<Vec<usize>, _> = v.split(',').map(str::parse).collect();
                sizes = Some(parsed.map_err(|_| parse_err(header_no, format!("bad layer list `{v}`")))?);
            }
            Some(("activation", v)) => activation = Some(v),
            _ => return Err(parse_err(header_no, format!("unknown header field `{field}`"))),
        }
    }
    if activation != Some("tanh") {
        return Err(parse_err(header_no, "only activation=tanh is supported".into()));
    }
    let sizes = sizes.ok_or_else(|| parse_err(header_no, "missing layers=".into()))?;
    let mut net = Network::zeros(&sizes).map_err(|e| parse_err(header_no, e.to_string()))?;

    let mut params = Vec::with_capacity(net.param_count());
    let mut last_line = header_no;
    for k in 0..net.layer_count() {
        let (weights, biases) = net.layer(k).expect("layer index in range");
        for (kind, expected) in [("weights", weights.len()), ("biases", biases.len())] {
            let label = format!("layer {} {kind}", k + 1);
            let (no, line) = lines
                .next()
                .ok_or_else(|| parse_err(last_line + 1, format!("missing `{label}` line")))?;
            last_line = no;
            let values = line
                .strip_prefix(&label)
                .ok_or_else(|| parse_err(no, format!("expected `{label}`")))?;
            let before = params.len();
            for token in values.split_whitespace() {
                let v: f64 = token
                    .parse()
                    .map_err(|_| parse_err(no, format!("`{token}` is not a number")))?;
                if !v.is_finite() {
                    return Err(parse_err(no, format!("non-finite value `{token}`")));
                }
                params.push(v);
            }
            let found = params.len() - before;
            if found != expected {
                return Err(parse_err(no, format!("{label}: expected {expected} values, found {found}")));
            }
        }
    }
    if let Some((no, _)) = lines.next() {
        return Err(parse_err(no, "unexpected trailing content".into()));
    }
    net.set_params(&params).map_err(|e| parse_err(last_line, e.to_string()))?;
    Ok(net)
}
