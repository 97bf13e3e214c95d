//! OPB text format as used by pseudo-boolean solvers.

use std::fmt::Write as _;

use super::{PbConstraint, Relation};
use crate::logic::Var;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpbInstance {
    pub constraints: Vec<PbConstraint>,
    pub objective: Option<Vec<(i64, Var)>>,
    pub num_vars: u32,
}

fn terms(out: &mut String, terms: &[(i64, Var)]) {
    for (a, v) in terms {
        write!(out, "{a:+} x{} ", v.id()).unwrap();
    }
}

/// Renders `≤` constraints as negated `≥` constraints.
pub fn to_opb(constraints: &[PbConstraint], objective: Option<&[(i64, Var)]>, num_vars: u32) -> String {
    let mut out = format!("* #variable= {num_vars} #constraint= {}\n", constraints.len());
    if let Some(obj) = objective {
        out.push_str("min: ");
        terms(&mut out, obj);
        out.push_str(";\n");
    }
    for c in constraints {
        let (ts, rel, bound) = match c.relation {
            Relation::Le => {
                (c.terms.iter().map(|&(a, v)| (-a, v)).collect(), Relation::Ge, -c.bound)
            }
            r => (c.terms.clone(), r, c.bound),
        };
        terms(&mut out, &ts);
        if ts.is_empty() {
            out.push_str("0 ");
        }
        writeln!(out, "{rel} {bound} ;").unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpbError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, OpbError> {
    Err(OpbError::Syntax { line, msg: msg.into() })
}

fn parse_terms(line: usize, toks: &[&str]) -> Result<Vec<(i64, Var)>, OpbError> {
    if toks.len() == 1 && toks[0] == "0" {
        return Ok(Vec::new());
    }
    if !toks.len().is_multiple_of(2) {
        return err(line, "expected coefficient/variable pairs");
    }
    toks.chunks(2)
        .map(|pair| {
            let a: i64 = pair[0]
                .parse()
                .or_else(|_| err(line, format!("bad coefficient `{}`", pair[0])))?;
            let id: u32 = pair[1]
                .strip_prefix('x')
                .and_then(|s| s.parse().ok())
                .filter(|&id| id > 0)
                .map_or_else(|| err(line, format!("bad variable `{}`", pair[1])), Ok)?;
            Ok((a, Var(id)))
        })
        .collect()
}

pub fn parse_opb(text: &str) -> Result<OpbInstance, OpbError> {
    let mut num_vars = None;
    let mut constraints = Vec::new();
    let mut objective = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if let Some(comment) = s.strip_prefix('*') {
            if let Some(rest) = comment.split("#variable=").nth(1) {
                num_vars = rest.split_whitespace().next().and_then(|n| n.parse().ok());
            }
            continue;
        }
        if s.is_empty() {
            continue;
        }
        let Some(body) = s.strip_suffix(';') else {
            return err(line, "missing `;`");
        };
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.first() == Some(&"min:") {
            objective = Some(parse_terms(line, &toks[1..])?);
            continue;
        }
        let Some(pos) = toks.iter().position(|t| matches!(*t, ">=" | "=" | "<=")) else {
            return err(line, "missing relation");
        };
        let rel = match toks[pos] {
            ">=" => Relation::Ge,
            "=" => Relation::Eq,
            _ => Relation::Le,
        };
        if pos + 2 != toks.len() {
            return err(line, "expected a single bound after the relation");
        }
        let bound: i64 = toks[pos + 1]
            .parse()
            .or_else(|_| err(line, format!("bad bound `{}`", toks[pos + 1])))?;
        constraints.push(PbConstraint::new(parse_terms(line, &toks[..pos])?, rel, bound));
    }
    let max_used = constraints
        .iter()
        .flat_map(|c| c.vars())
        .chain(objective.iter().flatten().map(|&(_, v)| v))
        .map(|v| v.id())
        .max()
        .unwrap_or(0);
    Ok(OpbInstance { constraints, objective, num_vars: num_vars.unwrap_or(max_used).max(max_used) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format() {
        let c = PbConstraint::ge([(2, Var(1)), (1, Var(2))], 2);
        assert_eq!(to_opb(&[c], None, 2), "* #variable= 2 #constraint= 1\n+2 x1 +1 x2 >= 2 ;\n");
    }

    #[test]
    fn objective_and_negation() {
        let c = PbConstraint::le([(1, Var(1)), (-3, Var(2))], 1);
        let text = to_opb(&[c], Some(&[(1, Var(3)), (2, Var(4))]), 4);
        assert!(text.contains("min: +1 x3 +2 x4 ;\n"), "{text}");
        assert!(text.contains("-1 x1 +3 x2 >= -1 ;\n"), "{text}");
        let back = parse_opb(&text).unwrap();
        assert_eq!(back.constraints, vec![PbConstraint::ge([(-1, Var(1)), (3, Var(2))], -1)]);
        assert_eq!(back.objective, Some(vec![(1, Var(3)), (2, Var(4))]));
        assert_eq!(back.num_vars, 4);
    }

    #[test]
    fn empty_constraint_round_trips() {
        let c = PbConstraint::ge([], 0);
        let text = to_opb(std::slice::from_ref(&c), None, 0);
        assert_eq!(parse_opb(&text).unwrap().constraints, vec![c]);
    }

    #[test]
    fn errors() {
        assert!(parse_opb("+1 x1 >= 1\n").is_err());
        assert!(parse_opb("+1 y1 >= 1 ;\n").is_err());
        assert!(parse_opb("+1 x1 1 ;\n").is_err());
    }
}
