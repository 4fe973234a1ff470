use std::fmt::Write as _;

use crate::scalar::Scalar;
use crate::simplex::{LpModel, Sense};

fn term<T: Scalar>(out: &mut String, first: bool, a: &T, name: &str) {
    let v = a.to_f64_lossy();
    if v < 0.0 {
        out.push_str(" -");
    } else if !first {
        out.push_str(" +");
    }
    let mag = v.abs();
    let _ = if mag == 1.0 {
        write!(out, " {name}")
    } else {
        write!(out, " {mag} {name}")
    };
}

/// CPLEX LP text of a model; structural variables are named `x0, x1, …`.
pub fn to_lp_text<T: Scalar>(model: &LpModel<T>) -> String {
    let mut s = String::from("\\ lpdlab relaxation dump\nMinimize\n obj:");
    let mut first = true;
    for (j, c) in model.cost.iter().enumerate() {
        if !c.is_zero() {
            term(&mut s, first, c, &format!("x{j}"));
            first = false;
        }
    }
    if first {
        s.push_str(" 0 x0");
    }
    s.push_str("\nSubject To\n");
    for (r, row) in model.rows.iter().enumerate() {
        let _ = write!(s, " c{r}:");
        for (k, (j, a)) in row.coeffs.iter().enumerate() {
            term(&mut s, k == 0, a, &format!("x{j}"));
        }
        let op = match row.sense {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        };
        let _ = writeln!(s, " {op} {}", row.rhs.to_f64_lossy());
    }
    s.push_str("Bounds\n");
    for j in 0..model.ncols() {
        match (&model.lower[j], &model.upper[j]) {
            (Some(l), Some(u)) => writeln!(s, " {} <= x{j} <= {}", l.to_f64_lossy(), u.to_f64_lossy()),
            (Some(l), None) => writeln!(s, " x{j} >= {}", l.to_f64_lossy()),
            (None, Some(u)) => writeln!(s, " -inf <= x{j} <= {}", u.to_f64_lossy()),
            (None, None) => writeln!(s, " x{j} free"),
        }
        .expect("writing to a String");
    }
    s.push_str("End\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::Row;

    #[test]
    fn dump_shape() {
        let mut m = LpModel::new(vec![1.0, -1.0], vec![Some(0.0); 2], vec![Some(1.0); 2]);
        m.rows.push(Row { coeffs: vec![(0, 1.0), (1, -1.0)], sense: Sense::Ge, rhs: 0.0 });
        let t = to_lp_text(&m);
        assert!(t.contains("obj: x0 - x1"));
        assert!(t.contains("c0: x0 - x1 >= 0"));
        assert!(t.contains("0 <= x1 <= 1"));
        assert!(t.ends_with("End\n"));
    }
}
