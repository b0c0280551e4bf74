//! DIMACS CNF export and a small parser for reading exports back.

use std::io::{BufRead, Write};

use crate::clause::Clause;
use crate::error::{invalid, Result};
use crate::projection::{Literal, TwoClause};

/// Something that can be written as one DIMACS clause line.
pub trait DimacsClause {
    fn dimacs_literals(&self) -> Vec<i64>;
}

impl DimacsClause for Clause {
    fn dimacs_literals(&self) -> Vec<i64> {
        self.literals().map(|(v, pos)| if pos { v as i64 } else { -(v as i64) }).collect()
    }
}

impl DimacsClause for TwoClause {
    fn dimacs_literals(&self) -> Vec<i64> {
        self.literals().iter().map(|l| l.to_dimacs()).collect()
    }
}

/// Writes `p cnf <n> <m>` followed by one zero-terminated line per clause.
pub fn export_dimacs<C: DimacsClause, W: Write + ?Sized>(formula: &[C], n: usize, sink: &mut W) -> Result<()> {
    writeln!(sink, "p cnf {n} {}", formula.len())?;
    for c in formula {
        let mut line = String::new();
        for lit in c.dimacs_literals() {
            line.push_str(&lit.to_string());
            line.push(' ');
        }
        line.push('0');
        writeln!(sink, "{line}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsFormula {
    pub n: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl DimacsFormula {
    pub fn to_clauses(&self) -> Result<Vec<Clause>> {
        self.clauses
            .iter()
            .map(|lits| {
                let vars = lits.iter().map(|l| l.unsigned_abs() as u32).collect();
                let signs = lits.iter().map(|&l| l > 0).collect();
                Clause::new(vars, signs, self.n as u32)
            })
            .collect()
    }

    pub fn to_two_clauses(&self) -> Result<Vec<TwoClause>> {
        self.clauses
            .iter()
            .map(|lits| match lits[..] {
                [a, b] => TwoClause::new(Literal::from_dimacs(a as i32), Literal::from_dimacs(b as i32)),
                _ => Err(invalid(format!("expected two literals, found {}", lits.len()))),
            })
            .collect()
    }
}

/// Parses a DIMACS CNF stream. Comment lines (`c ...`) are skipped; clauses
/// may span lines and end at `0`.
pub fn parse_dimacs<R: BufRead>(source: R) -> Result<DimacsFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in source.lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('p') {
            let parts: Vec<&str> = t.split_whitespace().collect();
            match parts[..] {
                ["p", "cnf", n, m] if header.is_none() => {
                    let num = |s: &str| s.parse::<usize>().map_err(|_| invalid(format!("bad header `{t}`")));
                    header = Some((num(n)?, num(m)?));
                }
                _ => return Err(invalid(format!("bad header `{t}`"))),
            }
            continue;
        }
        let (n, _) = header.ok_or_else(|| invalid("clause before `p cnf` header"))?;
        for tok in t.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| invalid(format!("bad literal `{tok}`")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n || lit.unsigned_abs() > i32::MAX as u64 {
                return Err(invalid(format!("literal {lit} outside 1..={n}")));
            } else {
                current.push(lit);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| invalid("missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(invalid("last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(invalid(format!("header announces {m} clauses, found {}", clauses.len())));
    }
    Ok(DimacsFormula { n, clauses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text<C: DimacsClause>(f: &[C], n: usize) -> String {
        let mut out = Vec::new();
        export_dimacs(f, n, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn clause_line() {
        let c = Clause::new(vec![1, 2, 3], vec![true, false, true], 3).unwrap();
        assert_eq!(text(&[c], 3), "p cnf 3 1\n1 -2 3 0\n");
    }

    #[test]
    fn empty_formula() {
        assert_eq!(text::<Clause>(&[], 5), "p cnf 5 0\n");
        let f = parse_dimacs("p cnf 5 0\n".as_bytes()).unwrap();
        assert_eq!(f, DimacsFormula { n: 5, clauses: vec![] });
    }

    #[test]
    fn two_clause_round_trip() {
        let tc = TwoClause::new(Literal::from_dimacs(7), Literal::from_dimacs(-2)).unwrap();
        let s = text(&[tc], 9);
        assert_eq!(s, "p cnf 9 1\n7 -2 0\n");
        assert_eq!(parse_dimacs(s.as_bytes()).unwrap().to_two_clauses().unwrap(), vec![tc]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_dimacs("1 2 0\n".as_bytes()).is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 3 0\n".as_bytes()).is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 2 0\n".as_bytes()).is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2\n".as_bytes()).is_err());
        assert!(parse_dimacs("p cnf x 1\n".as_bytes()).is_err());
        let f = parse_dimacs("c hi\np cnf 3 1\n1\n-3 0\n".as_bytes()).unwrap();
        assert_eq!(f.clauses, vec![vec![1, -3]]);
    }
}
