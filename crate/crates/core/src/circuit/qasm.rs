//! OpenQASM 2.0 export using only `x`, `rz`, `ry`, `cx` and `measure`.

use std::fmt::Write;

use super::{decompose_circuit, Circuit, Elementary};
use crate::error::{Error, Result};

pub fn export_qasm(circ: &Circuit) -> String {
    let n = circ.n_qubits();
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{n}];\ncreg c[{n}];");
    for op in decompose_circuit(circ) {
        let _ = match op {
            Elementary::X { q } => writeln!(out, "x q[{q}];"),
            Elementary::Rz { q, angle } => writeln!(out, "rz({angle:?}) q[{q}];"),
            Elementary::Ry { q, angle } => writeln!(out, "ry({angle:?}) q[{q}];"),
            Elementary::Cx { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
            Elementary::Measure { q } => writeln!(out, "measure q[{q}] -> c[{q}];"),
        };
    }
    out
}

fn qubit(tok: &str, reg: &str, n: usize) -> Result<usize> {
    let bad = || Error::InvalidArgument(format!("malformed operand `{tok}`"));
    let inner = tok
        .trim()
        .strip_prefix(reg)
        .and_then(|t| t.strip_prefix('['))
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(bad)?;
    let q: usize = inner.parse().map_err(|_| bad())?;
    if q >= n {
        return Err(Error::IndexOutOfRange { index: q, dim: n });
    }
    Ok(q)
}

/// Strict reader for the subset emitted by [`export_qasm`]; returns the register size and ops.
pub fn parse_qasm(text: &str) -> Result<(usize, Vec<Elementary>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let err = |m: &str| Error::InvalidArgument(format!("QASM: {m}"));
    if lines.next() != Some("OPENQASM 2.0;") {
        return Err(err("missing version header"));
    }
    if lines.next() != Some("include \"qelib1.inc\";") {
        return Err(err("missing include"));
    }
    let size = |l: Option<&str>, reg: &str| -> Result<usize> {
        let l = l.ok_or_else(|| err("missing register"))?;
        let body = l.strip_prefix(reg).and_then(|t| t.strip_suffix(';')).ok_or_else(|| err("bad register line"))?;
        body.strip_prefix(" q[")
            .or_else(|| body.strip_prefix(" c["))
            .and_then(|t| t.strip_suffix(']'))
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err("bad register size"))
    };
    let n = size(lines.next(), "qreg")?;
    if size(lines.next(), "creg")? != n {
        return Err(err("register sizes differ"));
    }
    let mut ops = Vec::new();
    for line in lines {
        let stmt = line.strip_suffix(';').ok_or_else(|| err("statement without `;`"))?;
        let (head, args) = stmt.split_once(' ').ok_or_else(|| err("statement without operands"))?;
        let angle = |name: &str| -> Result<f64> {
            head.strip_prefix(name)
                .and_then(|t| t.strip_prefix('('))
                .and_then(|t| t.strip_suffix(')'))
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("bad angle"))
        };
        let op = match head {
            "x" => Elementary::X { q: qubit(args, "q", n)? },
            "cx" => {
                let (a, b) = args.split_once(',').ok_or_else(|| err("cx needs two operands"))?;
                Elementary::Cx { control: qubit(a, "q", n)?, target: qubit(b, "q", n)? }
            }
            "measure" => {
                let (a, b) = args.split_once("->").ok_or_else(|| err("measure needs a target"))?;
                let q = qubit(a, "q", n)?;
                if qubit(b, "c", n)? != q {
                    return Err(err("measurement must target the matching bit"));
                }
                Elementary::Measure { q }
            }
            h if h.starts_with("rz(") => Elementary::Rz { q: qubit(args, "q", n)?, angle: angle("rz")? },
            h if h.starts_with("ry(") => Elementary::Ry { q: qubit(args, "q", n)?, angle: angle("ry")? },
            other => return Err(err(&format!("unsupported gate `{other}`"))),
        };
        ops.push(op);
    }
    Ok((n, ops))
}
