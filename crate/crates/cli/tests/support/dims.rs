//! Dimension calculus checked against hand-written arithmetic.

use dial_core::pipeline::compile;
use dial_core::typecheck::{dim_combine, DimOp};
use dial_core::Code;
use rand::Rng;

pub fn random_dims(rng: &mut impl Rng) -> Vec<u32> {
    let rank = rng.gen_range(1..=3);
    (0..rank).map(|_| rng.gen_range(1..=512)).collect()
}

/// Expected result: `None` where the operands are incompatible.
pub fn expected(op: DimOp, a: &[u32], b: &[u32]) -> Option<Vec<u32>> {
    match op {
        DimOp::Otimes => {
            let mut out = a.to_vec();
            out.extend_from_slice(b);
            Some(out)
        }
        DimOp::Oplus | DimOp::Concat => {
            if a.len() != b.len() || a[1..] != b[1..] {
                return None;
            }
            let mut out = a.to_vec();
            out[0] = a[0] + b[0];
            Some(out)
        }
    }
}

pub fn check_pair(op: DimOp, a: &[u32], b: &[u32]) -> Result<(), String> {
    let got = dim_combine(op, a, b).ok();
    let want = expected(op, a, b);
    if got == want {
        Ok(())
    } else {
        Err(format!("{op:?}({a:?}, {b:?}): expected {want:?}, got {got:?}"))
    }
}

fn literal(dims: &[u32]) -> String {
    let parts: Vec<String> = dims.iter().map(u32::to_string).collect();
    format!("vec[{}]", parts.join(","))
}

/// Runs a pair through the whole pipeline and checks the operator's
/// diagnostics: exactly one E103 on a rank mismatch for the additive
/// operators, none otherwise.
pub fn check_pipeline(op: DimOp, a: &[u32], b: &[u32]) -> Result<(), String> {
    let code = match op {
        DimOp::Oplus => "oplus",
        DimOp::Concat => "concat",
        DimOp::Otimes => "otimes",
    };
    let src = format!(
        "dial 0.1\ndialect sys\ndiagram \"D\" {{\n  data a: {}\n  data b: {}\n  node op: {code}\n  edge a -> op\n  edge b -> op\n}}\n",
        literal(a),
        literal(b)
    );
    let c = compile(&src);
    let codes: Vec<Code> = c.diagnostics.iter().map(|d| d.code).collect();
    let want: Vec<Code> = match expected(op, a, b) {
        None => vec![Code::E103],
        Some(_) => Vec::new(),
    };
    if codes != want {
        return Err(format!("{op:?}({a:?}, {b:?}): expected {want:?}, got {codes:?}"));
    }
    if a.len() != b.len() && op != DimOp::Otimes && codes != [Code::E103] {
        return Err(format!("{op:?}({a:?}, {b:?}): rank mismatch without E103"));
    }
    Ok(())
}
